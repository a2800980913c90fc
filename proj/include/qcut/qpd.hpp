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

// Quasi-probability decompositions of bipartite pure states into products of
// local pure states. Given psi = sum_j c_j |phi_j>|phi'_j> (c_j real):
//
//   |psi><psi| = sum_j c_j^2 P(phi_j) (x) P(phi'_j)
//              + sum_{i>j} (2 c_i c_j / alpha) sum_r [ P(xi+_r) - P(xi-_r) ] (x) P(tau_r)
//
//   xi+-_r = (phi_i +- e^{i phi_r} phi_j) / sqrt2,  tau_r = (phi'_i + e^{-i phi_r} phi'_j) / sqrt2,
//   phi_r  = 2 pi r / alpha.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcut/tensor.hpp"

namespace qcut {

inline void check_normalized_coefficients(std::span<const double> c, const char* who) {
  double s = 0.0;
  for (double x : c) s += x * x;
  if (std::abs(s - 1.0) > kStateTolerance) throw std::invalid_argument(std::string(who) + ": coefficients are not normalized");
}

/// Robustness of entanglement of a pure state from its Schmidt coefficients.
inline double robustness(std::span<const double> coefficients) {
  check_normalized_coefficients(coefficients, "robustness");
  double sum = 0.0;
  for (double c : coefficients) {
    if (c < 0.0) throw std::invalid_argument("robustness: Schmidt coefficients must be non-negative");
    sum += c;
  }
  return std::max(0.0, sum * sum - 1.0);
}

inline double gamma_from_schmidt(std::span<const double> coefficients) { return 1.0 + 2.0 * robustness(coefficients); }

/// phi_r = 2 pi r / alpha, r = 1..alpha.
inline std::vector<double> phase_set(int alpha) {
  if (alpha < 3) throw std::invalid_argument("phase_set: alpha must be at least 3");
  std::vector<double> out;
  for (int r = 1; r <= alpha; ++r) out.push_back(2.0 * kPi * r / alpha);
  return out;
}

struct QPDLabel {
  enum class Kind { Diagonal, Cross };
  Kind kind = Kind::Diagonal;
  std::size_t i = 0;  ///< diagonal index, or the larger index of a cross pair
  std::size_t j = 0;  ///< smaller index of a cross pair (== i for diagonal terms)
  int r = 0;          ///< phase index 1..alpha (cross terms)
  int sign = +1;      ///< +1 for xi+, -1 for xi- (cross terms)

  std::string str() const {
    if (kind == Kind::Diagonal) return "diag(" + std::to_string(i) + ")";
    return std::string("cross(") + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(r) + "," +
           (sign > 0 ? "+" : "-") + ")";
  }

  friend bool operator==(const QPDLabel&, const QPDLabel&) = default;
};

struct QPDTerm {
  double coefficient = 0.0;
  Statevector state_a;
  Statevector state_b;
  QPDLabel label;

  /// Outcome-sign mask for teleportation-style use: bit s is set when the
  /// expansion indices differ at position s, i.e. when ancilla outcomes
  /// (k_s, l_s) with k_s != l_s flip this term's sign.
  std::uint64_t sign_mask() const { return label.kind == QPDLabel::Kind::Diagonal ? 0 : (label.i ^ label.j); }

  /// prod_s (-1)^{(k_s xor l_s)(i_s xor j_s)} with index bit s counted from
  /// the most significant end of an n-bit index.
  int outcome_sign(std::span<const int> k, std::span<const int> l) const {
    if (k.size() != l.size()) throw std::invalid_argument("outcome_sign: k and l must have equal length");
    const std::size_t n = k.size();
    const std::uint64_t mask = sign_mask();
    int parity = 0;
    for (std::size_t s = 0; s < n; ++s)
      if ((mask >> (n - 1 - s)) & 1U) parity ^= (k[s] ^ l[s]) & 1;
    return parity ? -1 : 1;
  }
};

struct QPD {
  std::vector<QPDTerm> terms;
  double kappa = 0.0;
  double gamma = 0.0;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;
  int alpha = 4;
  std::string target_description;
};

/// Decomposition built from an arbitrary real-coefficient expansion. Terms
/// keep their structural position even when a coefficient is zero, so the
/// term count is always m + alpha m (m-1). gamma is left to the caller.
inline QPD qpd_from_expansion(std::span<const double> c, std::span<const Statevector> left,
                              std::span<const Statevector> right, int alpha) {
  const auto phases = phase_set(alpha);
  if (c.size() != left.size() || c.size() != right.size() || c.empty()) {
    throw std::invalid_argument("qpd_from_expansion: coefficient and basis lists must be non-empty and equal in length");
  }
  check_normalized_coefficients(c, "qpd_from_expansion");
  const std::size_t m = c.size();
  QPD q;
  q.alpha = alpha;
  q.dim_a = left.front().dimension();
  q.dim_b = right.front().dimension();
  const double h = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < m; ++j) {
    q.terms.push_back({c[j] * c[j], left[j], right[j], {QPDLabel::Kind::Diagonal, j, j}});
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double w = 2.0 * c[i] * c[j] / alpha;
      for (int r = 1; r <= alpha; ++r) {
        const Complex e = std::polar(1.0, phases[r - 1]);
        std::vector<Complex> tau(q.dim_b);
        for (std::size_t x = 0; x < q.dim_b; ++x) tau[x] = h * (right[i][x] + std::conj(e) * right[j][x]);
        const auto tau_state = Statevector::normalized(std::move(tau));
        for (int sgn : {+1, -1}) {
          std::vector<Complex> xi(q.dim_a);
          for (std::size_t x = 0; x < q.dim_a; ++x) xi[x] = h * (left[i][x] + double(sgn) * e * left[j][x]);
          q.terms.push_back({sgn * w, Statevector::normalized(std::move(xi)), tau_state,
                             {QPDLabel::Kind::Cross, i, j, r, sgn}});
        }
      }
    }
  for (const auto& t : q.terms) q.kappa += std::abs(t.coefficient);
  return q;
}

/// Optimal decomposition of |psi><psi| across dim_a | dim_b via its Schmidt
/// decomposition; kappa equals 2 (sum c_j)^2 - 1.
inline QPD pure_state_qpd(const Statevector& psi, std::size_t dim_a, std::size_t dim_b, int alpha = 4) {
  if (alpha < 3) throw std::invalid_argument("pure_state_qpd: alpha must be at least 3");
  if (std::abs(psi.norm() - 1.0) > kStateTolerance) throw std::invalid_argument("pure_state_qpd: state is not normalized");
  const auto sd = schmidt_decompose(psi, dim_a, dim_b);
  // Renormalize after pruning so the expansion stays exactly normalized.
  std::vector<double> c = sd.coefficients;
  double s = 0.0;
  for (double x : c) s += x * x;
  for (double& x : c) x /= std::sqrt(s);
  QPD q = qpd_from_expansion(c, sd.left_basis, sd.right_basis, alpha);
  q.gamma = gamma_from_schmidt(c);
  q.target_description = "pure state, Schmidt rank " + std::to_string(c.size());
  return q;
}

/// || sum_i a_i rho_a,i (x) rho_b,i - target ||_F
inline double verify_qpd(const QPD& qpd, const DensityMatrix& target) {
  const std::size_t d = target.dimension();
  Matrix acc(d, d);
  for (const auto& t : qpd.terms) {
    const auto v = kron(t.state_a, t.state_b);
    if (v.dimension() != d) throw std::invalid_argument("verify_qpd: dimension mismatch");
    for (std::size_t r = 0; r < d; ++r) {
      const Complex vr = t.coefficient * v[r];
      if (vr == Complex{}) continue;
      for (std::size_t c = 0; c < d; ++c) acc(r, c) += vr * std::conj(v[c]);
    }
  }
  return frobenius_distance(acc, target.matrix());
}

}  // namespace qcut
