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

// Diagonal observables as weighted sums of Z strings.
//
// Accepted specs:
//   "parity"                      Z on every qubit
//   "z 3"                         Z on qubit 3
//   "zz 0 5"                      Z Z on qubits 0 and 5
//   "0.5 z0 z1 + -0.5 z2"         weighted sum; sum |coef| must not exceed 1

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcut/circuit.hpp"

namespace qcut {

class Observable {
 public:
  struct Term {
    double coefficient;
    std::uint64_t mask;  ///< basis-index bits carrying a Z
  };

  Observable(std::size_t num_qubits, std::vector<Term> terms, std::string description)
      : n_(num_qubits), terms_(std::move(terms)), description_(std::move(description)) {
    double norm = 0.0;
    for (const auto& t : terms_) norm += std::abs(t.coefficient);
    if (norm > 1.0 + 1e-12) throw std::invalid_argument("observable: sum of |coefficients| exceeds 1");
  }

  static Observable parse(const std::string& spec, std::size_t num_qubits) {
    if (num_qubits > 63) throw std::invalid_argument("observable: too many qubits");
    auto bit = [&](long q) {
      if (q < 0 || static_cast<std::size_t>(q) >= num_qubits) {
        throw std::invalid_argument("observable: qubit index " + std::to_string(q) + " out of range");
      }
      return std::uint64_t{1} << (num_qubits - 1 - static_cast<std::size_t>(q));
    };
    std::istringstream in(spec);
    std::string head;
    in >> head;
    if (head == "parity") {
      return Observable(num_qubits, {{1.0, (std::uint64_t{1} << num_qubits) - 1}}, spec);
    }
    if (head == "z" || head == "zz") {
      long a = -1, b = -1;
      if (!(in >> a)) throw std::invalid_argument("observable: expected a qubit index after '" + head + "'");
      std::uint64_t mask = bit(a);
      if (head == "zz") {
        if (!(in >> b)) throw std::invalid_argument("observable: 'zz' needs two qubit indices");
        if (a == b) throw std::invalid_argument("observable: 'zz' indices must differ");
        mask |= bit(b);
      }
      std::string rest;
      if (in >> rest) throw std::invalid_argument("observable: trailing input '" + rest + "'");
      return Observable(num_qubits, {{1.0, mask}}, spec);
    }
    // Weighted sum of Z strings.
    std::vector<Term> terms;
    std::size_t start = 0;
    while (start <= spec.size()) {
      const std::size_t plus = spec.find(" + ", start);
      const std::string part = spec.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
      std::istringstream ts(part);
      Term t{0.0, 0};
      if (!(ts >> t.coefficient)) throw std::invalid_argument("observable: cannot parse term '" + part + "'");
      std::string tok;
      while (ts >> tok) {
        if (tok.size() < 2 || (tok[0] != 'z' && tok[0] != 'Z')) {
          throw std::invalid_argument("observable: expected z<index>, got '" + tok + "'");
        }
        std::size_t used = 0;
        long q = -1;
        try {
          q = std::stol(tok.substr(1), &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tok.size() - 1) throw std::invalid_argument("observable: bad qubit token '" + tok + "'");
        t.mask ^= bit(q);
      }
      terms.push_back(t);
      if (plus == std::string::npos) break;
      start = plus + 3;
    }
    return Observable(num_qubits, std::move(terms), spec);
  }

  double operator()(std::uint64_t s) const {
    double v = 0.0;
    for (const auto& t : terms_) v += (std::popcount(s & t.mask) & 1) ? -t.coefficient : t.coefficient;
    return v;
  }

  BitstringFunction function() const {
    return [self = *this](std::uint64_t s) { return self(s); };
  }

  std::size_t num_qubits() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::string& description() const { return description_; }

 private:
  std::size_t n_;
  std::vector<Term> terms_;
  std::string description_;
};

}  // namespace qcut
