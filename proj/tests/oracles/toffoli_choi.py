# Copyright 2026 The qcut Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates tests/data/toffoli_lower_bound.json.

Brute force: build the 6-qubit Choi vector of the Toffoli gate, group
(system q0, reference q0) against the rest and take numpy's SVD.
"""

import json
import pathlib

import numpy as np


def main() -> None:
    u = np.eye(8)
    u[[6, 7]] = u[[7, 6]]
    # |C> = sum_x U|x> (x) |x> / sqrt(8), axes (s0, s1, s2, r0, r1, r2)
    choi = np.einsum("ab,bc->ac", u, np.eye(8)).reshape(2, 2, 2, 2, 2, 2) / np.sqrt(8)
    m = choi.transpose(0, 3, 1, 2, 4, 5).reshape(4, 16)
    s = np.linalg.svd(m, compute_uv=False)
    s = s[s > 1e-12]
    out = {
        "gate": "toffoli",
        "cut": "q0 | q1 q2",
        "schmidt_coefficients": [float(x) for x in s],
        "gamma_lower": float(2 * s.sum() ** 2 - 1),
    }
    path = pathlib.Path(__file__).resolve().parent.parent / "data" / "toffoli_lower_bound.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out))


if __name__ == "__main__":
    main()
