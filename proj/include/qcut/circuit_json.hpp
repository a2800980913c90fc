// Copyright 2026 The qcut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Circuit <-> JSON.
//
//   {"num_qubits": 4, "partition": ["A","A","B","B"],
//    "gates": [{"kind": "rzz", "qubits": [1, 2], "angle": 1.5707963267948966},
//              {"kind": "measure", "qubits": [0], "bit": 0},
//              {"kind": "prep", "qubits": [1, 2], "amplitudes": [[0.7071, 0], [0, 0], [0, 0], [0.7071, 0]]},
//              {"kind": "cond_x", "qubits": [2], "bit": 0}],
//    "num_classical_bits": 1, "sign_bits": [0]}
//
// The last two keys and the "cond_x" / "cond_z" kinds are optional.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qcut/circuit.hpp"

namespace qcut {

inline nlohmann::json to_json(const Circuit& c) {
  using nlohmann::json;
  json j;
  j["num_qubits"] = c.num_qubits;
  json part = json::array();
  for (auto p : c.partition) part.push_back(p == Partition::A ? "A" : "B");
  j["partition"] = part;
  json gates = json::array();
  for (const auto& g : c.gates) {
    json jg;
    if (g.kind == GateKind::ConditionedPauli) jg["kind"] = g.pauli == Pauli::X ? "cond_x" : "cond_z";
    else jg["kind"] = to_string(g.kind);
    jg["qubits"] = g.qubits;
    switch (g.kind) {
      case GateKind::RZ:
      case GateKind::RZZ:
      case GateKind::MultiRZ: jg["angle"] = g.angle; break;
      case GateKind::MeasureZ:
      case GateKind::ConditionedPauli: jg["bit"] = g.bit; break;
      case GateKind::PrepareState: {
        json amps = json::array();
        for (const auto& a : g.amplitudes) amps.push_back({a.real(), a.imag()});
        jg["amplitudes"] = amps;
        break;
      }
      default: break;
    }
    gates.push_back(jg);
  }
  j["gates"] = gates;
  if (c.num_classical_bits > 0) j["num_classical_bits"] = c.num_classical_bits;
  if (!c.sign_bits.empty()) j["sign_bits"] = c.sign_bits;
  return j;
}

inline Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c;
  try {
    c.num_qubits = j.at("num_qubits").get<std::size_t>();
    if (j.contains("partition")) {
      for (const auto& p : j.at("partition")) {
        const auto s = p.get<std::string>();
        if (s == "A") c.partition.push_back(Partition::A);
        else if (s == "B") c.partition.push_back(Partition::B);
        else throw std::invalid_argument("circuit json: partition entries must be \"A\" or \"B\"");
      }
    }
    c.num_classical_bits = j.value("num_classical_bits", std::size_t{0});
    if (j.contains("sign_bits")) c.sign_bits = j.at("sign_bits").get<std::vector<std::size_t>>();
    for (const auto& jg : j.at("gates")) {
      const auto kind = jg.at("kind").get<std::string>();
      const auto qs = jg.at("qubits").get<std::vector<std::size_t>>();
      auto q = [&](std::size_t k) {
        if (k >= qs.size()) throw std::invalid_argument("circuit json: gate '" + kind + "' has too few qubits");
        return qs[k];
      };
      Gate g;
      if (kind == "h") g = Gate::h(q(0));
      else if (kind == "s") g = Gate::s(q(0));
      else if (kind == "sdg") g = Gate::sdg(q(0));
      else if (kind == "x") g = Gate::x(q(0));
      else if (kind == "z") g = Gate::z(q(0));
      else if (kind == "rz") g = Gate::rz(q(0), jg.at("angle").get<double>());
      else if (kind == "rzz") g = Gate::rzz(q(0), q(1), jg.at("angle").get<double>());
      else if (kind == "mrz") g = Gate::multi_rz(qs, jg.at("angle").get<double>());
      else if (kind == "cnot") g = Gate::cnot(q(0), q(1));
      else if (kind == "measure") g = Gate::measure(q(0), jg.at("bit").get<std::size_t>());
      else if (kind == "cond_x") g = Gate::conditioned(Pauli::X, q(0), jg.at("bit").get<std::size_t>());
      else if (kind == "cond_z") g = Gate::conditioned(Pauli::Z, q(0), jg.at("bit").get<std::size_t>());
      else if (kind == "prep") {
        std::vector<Complex> amps;
        for (const auto& a : jg.at("amplitudes")) {
          if (a.is_number()) amps.emplace_back(a.get<double>(), 0.0);
          else amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
        }
        g = Gate::prepare(qs, std::move(amps));
      } else {
        throw std::invalid_argument("circuit json: unknown gate kind '" + kind + "'");
      }
      g.qubits = qs;
      c.gates.push_back(std::move(g));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("circuit json: ") + e.what());
  }
  validate(c);
  return c;
}

inline Circuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("circuit file '" + path + "': " + e.what());
  }
  return circuit_from_json(j);
}

}  // namespace qcut
