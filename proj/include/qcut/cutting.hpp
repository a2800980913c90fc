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

// Gate cutting for Z-type rotations crossing an A|B partition.
//
// A CutDecomposition replaces a group of cut R_zz gates in a base circuit by
// a weighted list of ExecutableTerms. Each term carries, for every gate of the
// group, a slot of A-side and B-side operations that is spliced into the base
// circuit at that gate's position. Summing weight * (A channel) (x) (B channel)
// over terms, with outcome signs applied, reproduces the base circuit.
//
// Schemes:
//   independent           product of single-gate ancilla-free decompositions
//   joint_teleport        virtual teleportation through one jointly decomposed
//                         2n-ancilla resource state
//   parallel_ancilla_free Z strings, +-pi/2 multi-qubit rotations and parity
//                         instruments applied directly to the data qubits

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcut/circuit.hpp"
#include "qcut/qpd.hpp"
#include "qcut/tensor.hpp"

namespace qcut {

/// Weights below this magnitude are dropped from decompositions.
inline constexpr double kWeightTolerance = 1e-14;

// ---------------------------------------------------------------------------
// Closed forms

inline double gamma_single(double theta) { return 1.0 + 2.0 * std::abs(std::sin(theta)); }

inline double gamma_independent(std::span<const double> thetas) {
  double g = 1.0;
  for (double t : thetas) g *= gamma_single(t);
  return g;
}

inline double gamma_joint(std::span<const double> thetas) {
  double p = 1.0;
  for (double t : thetas) p *= 1.0 + std::abs(std::sin(t));
  return 2.0 * p - 1.0;
}

// ---------------------------------------------------------------------------
// Lower bounds

/// 2 (sum c_j)^2 - 1 over the Choi-state Schmidt coefficients of u across
/// the first log2(dim_a) | last log2(dim_b) qubits.
inline double lower_bound_gamma(const Matrix& u, std::size_t dim_a, std::size_t dim_b) {
  if (!u.is_unitary()) throw std::invalid_argument("lower_bound_gamma: matrix is not unitary");
  const auto c = choi_schmidt_coefficients(u, dim_a, dim_b);
  double s = 0.0;
  for (double x : c) s += x;
  return 2.0 * s * s - 1.0;
}

/// Same bound for a diagonal unitary given only its diagonal: the Choi state
/// has the Schmidt coefficients of the normalized diagonal vector.
inline double lower_bound_gamma_diagonal(std::span<const Complex> diag, std::size_t dim_a, std::size_t dim_b) {
  if (diag.size() != dim_a * dim_b) throw std::invalid_argument("lower_bound_gamma_diagonal: dimension mismatch");
  std::vector<Complex> v(diag.begin(), diag.end());
  for (auto& x : v) {
    if (std::abs(std::abs(x) - 1.0) > kStateTolerance) throw std::invalid_argument("lower_bound_gamma_diagonal: not unitary");
    x /= std::sqrt(static_cast<double>(diag.size()));
  }
  const auto sd = schmidt_decompose(Statevector::from_amplitudes(std::move(v)), dim_a, dim_b);
  double s = 0.0;
  for (double x : sd.coefficients) s += x;
  return 2.0 * s * s - 1.0;
}

// ---------------------------------------------------------------------------
// Canonical R_zz layer: gate s acts on qubits (s, n + s), A = 0..n-1, B = n..2n-1.

inline Circuit rzz_layer_circuit(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  Circuit c;
  c.num_qubits = 2 * n;
  c.partition.assign(2 * n, Partition::B);
  std::fill(c.partition.begin(), c.partition.begin() + static_cast<std::ptrdiff_t>(n), Partition::A);
  for (std::size_t s = 0; s < n; ++s) c.add(Gate::rzz(s, n + s, thetas[s]));
  return c;
}

/// Diagonal of the canonical layer unitary, computed without a dense matrix.
inline std::vector<Complex> rzz_layer_diagonal(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  std::vector<Complex> d(std::size_t{1} << (2 * n));
  for (std::size_t x = 0; x < d.size(); ++x) {
    double phase = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const int a = (x >> (2 * n - 1 - s)) & 1U;
      const int b = (x >> (n - 1 - s)) & 1U;
      phase += (a ^ b) ? thetas[s] / 2 : -thetas[s] / 2;
    }
    d[x] = std::polar(1.0, phase);
  }
  return d;
}

inline Matrix rzz_layer_unitary(std::span<const double> thetas) {
  const auto d = rzz_layer_diagonal(thetas);
  return Matrix::diagonal(d);
}

/// c_j = prod_s (cos(theta_s/2) if j_s = 0 else sin(theta_s/2)); j_1 is the
/// most significant bit.
inline std::vector<double> resource_coefficients(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  std::vector<double> c(std::size_t{1} << n, 1.0);
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t s = 0; s < n; ++s)
      c[j] *= ((j >> (n - 1 - s)) & 1U) ? std::sin(thetas[s] / 2) : std::cos(thetas[s] / 2);
  return c;
}

/// Resource state whose diagonal-Schur map equals the canonical layer:
/// H^{(x)n} (x) (H S^dag)^{(x)n} sum_j c_j |j>|j>, B qubits ordered by gate.
inline Statevector parallel_resource_state(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  const auto c = resource_coefficients(thetas);
  std::vector<Complex> amps(std::size_t{1} << (2 * n));
  for (std::size_t j = 0; j < c.size(); ++j) amps[(j << n) | j] = c[j];
  Circuit loc;
  loc.num_qubits = 2 * n;
  loc.add(Gate::prepare([&] {
    std::vector<std::size_t> all(2 * n);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }(), amps));
  for (std::size_t s = 0; s < n; ++s) loc.add(Gate::h(s));
  for (std::size_t s = 0; s < n; ++s) loc.add(Gate::sdg(n + s)).add(Gate::h(n + s));
  return simulate_statevector(loc, 0).state;
}

/// rho -> D * (X o rho) (entrywise product), D the dimension of X.
inline SuperOperator schur_channel(const Statevector& psi) {
  const std::size_t d = psi.dimension();
  Matrix s(d * d, d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) s(i + j * d, i + j * d) = static_cast<double>(d) * psi[i] * std::conj(psi[j]);
  return SuperOperator(std::move(s));
}

// ---------------------------------------------------------------------------
// Multi-qubit rotation reduction

struct RotationReduction {
  std::vector<Gate> before;  ///< CNOT ladders, each inside one partition
  Gate core;                 ///< cross-partition RZZ
  std::vector<Gate> after;

  std::vector<Gate> gates() const {
    std::vector<Gate> out = before;
    out.push_back(core);
    out.insert(out.end(), after.begin(), after.end());
    return out;
  }
};

/// exp(-i a/2 Z..Z) on qubits spanning both partitions becomes local parity
/// ladders onto one qubit per side plus a single RZZ(a) between them.
inline RotationReduction reduce_multiqubit_rotation(const Gate& g, std::span<const Partition> partition_of) {
  if (g.kind != GateKind::MultiRZ && g.kind != GateKind::RZZ) {
    throw std::invalid_argument("reduce_multiqubit_rotation: expected a Z rotation");
  }
  std::vector<std::size_t> qa, qb;
  for (auto q : g.qubits) {
    if (q >= partition_of.size()) throw std::invalid_argument("reduce_multiqubit_rotation: qubit without partition tag");
    (partition_of[q] == Partition::A ? qa : qb).push_back(q);
  }
  if (qa.empty() || qb.empty()) throw std::invalid_argument("reduce_multiqubit_rotation: gate does not cross the cut");
  RotationReduction r;
  auto la = parity_ladder(qa), lb = parity_ladder(qb);
  r.before = la;
  r.before.insert(r.before.end(), lb.begin(), lb.end());
  r.core = Gate::rzz(qa.back(), qb.back(), g.angle);
  for (auto& x : reversed(la)) r.after.push_back(x);
  for (auto& x : reversed(lb)) r.after.push_back(x);
  return r;
}

inline bool crosses_partition(const Gate& g, std::span<const Partition> partition_of) {
  bool a = false, b = false;
  for (auto q : g.qubits) (partition_of[q] == Partition::A ? a : b) = true;
  return a && b;
}

/// Rewrites every cross-partition MultiRZ into local ladders plus one RZZ.
inline Circuit reduce_cut_rotations(const Circuit& c) {
  validate(c);
  Circuit out = c;
  out.gates.clear();
  for (const auto& g : c.gates) {
    if (g.kind == GateKind::MultiRZ && !c.partition.empty() && crosses_partition(g, c.partition)) {
      out.add(reduce_multiqubit_rotation(g, c.partition).gates());
    } else {
      out.add(g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gate groups

struct GateGroup {
  std::vector<std::size_t> gate_indices;  ///< ascending circuit positions
  std::vector<double> thetas;
  std::vector<std::size_t> qubits_a;  ///< A-side data qubit of each gate
  std::vector<std::size_t> qubits_b;
  bool parallel = false;

  std::size_t size() const { return gate_indices.size(); }
};

/// Indices of the RZZ gates with one qubit in each partition.
inline std::vector<std::size_t> find_cut_gates(const Circuit& c) {
  std::vector<std::size_t> out;
  if (c.partition.empty()) return out;
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].kind == GateKind::RZZ && crosses_partition(c.gates[i], c.partition)) out.push_back(i);
  return out;
}

inline GateGroup make_gate_group(const Circuit& c, std::vector<std::size_t> indices) {
  validate(c);
  if (c.partition.empty()) throw std::invalid_argument("gate group: circuit has no partition");
  std::sort(indices.begin(), indices.end());
  if (std::adjacent_find(indices.begin(), indices.end()) != indices.end()) {
    throw std::invalid_argument("gate group: repeated gate index");
  }
  GateGroup g;
  for (auto idx : indices) {
    if (idx >= c.gates.size()) throw std::invalid_argument("gate group: gate index out of range");
    const Gate& gate = c.gates[idx];
    if (gate.kind != GateKind::RZZ || !crosses_partition(gate, c.partition)) {
      throw std::invalid_argument("gate group: gate " + std::to_string(idx) + " is not a cut RZZ");
    }
    const bool first_is_a = c.partition[gate.qubits[0]] == Partition::A;
    g.gate_indices.push_back(idx);
    g.thetas.push_back(gate.angle);
    g.qubits_a.push_back(first_is_a ? gate.qubits[0] : gate.qubits[1]);
    g.qubits_b.push_back(first_is_a ? gate.qubits[1] : gate.qubits[0]);
  }
  // Parallel: disjoint qubits and nothing in between touches any of them.
  std::vector<bool> used(c.num_qubits, false);
  bool parallel = true;
  for (std::size_t s = 0; s < g.size(); ++s) {
    for (auto q : {g.qubits_a[s], g.qubits_b[s]}) {
      if (used[q]) parallel = false;
      used[q] = true;
    }
  }
  if (parallel && !indices.empty()) {
    for (std::size_t i = indices.front(); i <= indices.back(); ++i) {
      if (std::binary_search(indices.begin(), indices.end(), i)) continue;
      for (auto q : c.gates[i].qubits)
        if (used[q]) parallel = false;
    }
  }
  g.parallel = parallel;
  return g;
}

// ---------------------------------------------------------------------------
// Decompositions

enum class CutScheme { Independent, JointTeleport, ParallelAncillaFree };

inline const char* to_string(CutScheme s) {
  switch (s) {
    case CutScheme::Independent: return "independent";
    case CutScheme::JointTeleport: return "joint_teleport";
    case CutScheme::ParallelAncillaFree: return "parallel_ancilla_free";
  }
  return "?";
}

struct ExecutableTerm {
  double weight = 0.0;
  /// ops_a[g] / ops_b[g] are spliced in place of the group's g-th gate.
  std::vector<std::vector<Gate>> ops_a;
  std::vector<std::vector<Gate>> ops_b;
  std::vector<std::size_t> sign_bits_a;
  std::vector<std::size_t> sign_bits_b;
  std::string label;

  std::vector<std::size_t> outcome_sign_bits() const {
    std::vector<std::size_t> out = sign_bits_a;
    out.insert(out.end(), sign_bits_b.begin(), sign_bits_b.end());
    return out;
  }
};

struct CutDecomposition {
  std::vector<ExecutableTerm> terms;
  double gamma = 1.0;
  CutScheme scheme = CutScheme::Independent;
  std::size_t ancillas_per_partition = 0;
  Circuit base;  ///< measurement-free circuit being decomposed
  GateGroup group;
  std::vector<Partition> partition;  ///< base qubits followed by ancillas
  std::size_t num_classical_bits = 0;

  std::size_t data_qubits() const { return base.num_qubits; }
  std::size_t total_qubits() const { return partition.size(); }
  double kappa() const {
    double k = 0.0;
    for (const auto& t : terms) k += std::abs(t.weight);
    return k;
  }
};

namespace detail {

struct LocalTerm {
  double weight;
  std::vector<Gate> a;
  std::vector<Gate> b;
  std::vector<std::size_t> sign_a;
  std::vector<std::size_t> sign_b;
  std::string label;
};

inline std::vector<Gate> z_string(std::span<const std::size_t> qubits, std::size_t bits, std::size_t n) {
  std::vector<Gate> out;
  for (std::size_t s = 0; s < n; ++s)
    if ((bits >> (n - 1 - s)) & 1U) out.push_back(Gate::z(qubits[s]));
  return out;
}

inline std::vector<Gate> concat(std::vector<Gate> a, const std::vector<Gate>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Ancilla-free terms for gates s on (qa[s], qb[s]). Instrument outcomes are
/// written to bit_a / bit_b.
inline std::vector<LocalTerm> parallel_terms(std::span<const double> thetas, std::span<const std::size_t> qa,
                                             std::span<const std::size_t> qb, std::size_t bit_a, std::size_t bit_b) {
  const std::size_t n = thetas.size();
  const auto c = resource_coefficients(thetas);
  const std::size_t m = c.size();
  std::vector<LocalTerm> out;
  auto push = [&](double w, std::vector<Gate> a, std::vector<Gate> b, bool sa, bool sb, std::string label) {
    if (std::abs(w) < kWeightTolerance) return;
    LocalTerm t{w, std::move(a), std::move(b), {}, {}, std::move(label)};
    if (sa) t.sign_a.push_back(bit_a);
    if (sb) t.sign_b.push_back(bit_b);
    out.push_back(std::move(t));
  };
  for (std::size_t j = 0; j < m; ++j) {
    push(c[j] * c[j], z_string(qa, j, n), z_string(qb, j, n), false, false, "diag(" + std::to_string(j) + ")");
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double w = 2.0 * c[i] * c[j];
      if (std::abs(w) < kWeightTolerance) continue;
      std::vector<std::size_t> sa, sb;
      for (std::size_t s = 0; s < n; ++s)
        if (((i ^ j) >> (n - 1 - s)) & 1U) {
          sa.push_back(qa[s]);
          sb.push_back(qb[s]);
        }
      if (sa.empty()) throw std::logic_error("parallel_terms: empty support for distinct indices");
      const int nu = std::popcount(j) - std::popcount(i);
      const auto za = z_string(qa, i, n), zb = z_string(qb, i, n);
      const auto pa = build_parity_instrument(sa, bit_a), pb = build_parity_instrument(sb, bit_b);
      auto ra = [&](int sg) { return build_multi_rz_ladder(sg * kPi / 2, sa); };
      auto rb = [&](int sg) { return build_multi_rz_ladder(sg * kPi / 2, sb); };
      const std::string base = "pair(" + std::to_string(i) + "," + std::to_string(j) + ")";
      if (nu % 2 == 0) {
        const double sgn = (nu / 2) % 2 == 0 ? 1.0 : -1.0;
        push(sgn * w, concat(pa, za), concat(pb, zb), true, true, base + ":PP");
        for (int x : {+1, -1})
          for (int y : {+1, -1}) {
            push(-sgn * w * x * y / 4.0, concat(ra(x), za), concat(rb(y), zb), false, false,
                 base + ":R" + (x > 0 ? "+" : "-") + "R" + (y > 0 ? "+" : "-"));
          }
      } else {
        const double sgn = ((nu - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
        for (int x : {+1, -1}) {
          push(sgn * w * x / 2.0, concat(ra(x), za), concat(pb, zb), false, true,
               base + ":R" + (x > 0 ? "+" : "-") + "P");
          push(sgn * w * x / 2.0, concat(pa, za), concat(rb(x), zb), true, false,
               base + ":PR" + (x > 0 ? "+" : "-"));
        }
      }
    }
  return out;
}

inline CutDecomposition start_decomposition(const Circuit& c, const GateGroup& g, CutScheme scheme) {
  for (const auto& gate : c.gates) {
    if (!gate.is_unitary()) throw std::invalid_argument("cut: base circuit must be measurement-free");
  }
  CutDecomposition d;
  d.scheme = scheme;
  d.base = c;
  d.group = g;
  d.partition = c.partition;
  return d;
}

}  // namespace detail

/// Ancilla-free decomposition of a parallel group.
inline CutDecomposition cut_parallel_ancilla_free(const Circuit& c, const GateGroup& g) {
  if (!g.parallel) throw std::invalid_argument("cut_parallel_ancilla_free: gates are not parallel");
  auto d = detail::start_decomposition(c, g, CutScheme::ParallelAncillaFree);
  d.num_classical_bits = 2;
  const std::size_t slots = g.size();
  for (auto& lt : detail::parallel_terms(g.thetas, g.qubits_a, g.qubits_b, 0, 1)) {
    ExecutableTerm t;
    t.weight = lt.weight;
    t.ops_a.assign(slots, {});
    t.ops_b.assign(slots, {});
    if (slots > 0) {
      t.ops_a[0] = std::move(lt.a);
      t.ops_b[0] = std::move(lt.b);
    }
    t.sign_bits_a = std::move(lt.sign_a);
    t.sign_bits_b = std::move(lt.sign_b);
    t.label = std::move(lt.label);
    d.terms.push_back(std::move(t));
  }
  if (slots == 0) d.terms.push_back({1.0, {}, {}, {}, {}, "identity"});
  d.gamma = gamma_joint(g.thetas);
  return d;
}

/// Canonical layer: gate s on (s, n + s).
inline CutDecomposition cut_parallel_ancilla_free(std::span<const double> thetas) {
  const auto c = rzz_layer_circuit(thetas);
  std::vector<std::size_t> idx(thetas.size());
  std::iota(idx.begin(), idx.end(), 0);
  return cut_parallel_ancilla_free(c, make_gate_group(c, idx));
}

/// Product of single-gate ancilla-free decompositions, each spliced at its
/// own gate. Gate s writes classical bits 2s (A) and 2s + 1 (B).
inline CutDecomposition cut_independent(const Circuit& c, const GateGroup& g) {
  auto d = detail::start_decomposition(c, g, CutScheme::Independent);
  d.num_classical_bits = 2 * g.size();
  std::vector<ExecutableTerm> acc{{1.0, {}, {}, {}, {}, ""}};
  for (std::size_t s = 0; s < g.size(); ++s) {
    const double th[] = {g.thetas[s]};
    const std::size_t qa[] = {g.qubits_a[s]}, qb[] = {g.qubits_b[s]};
    const auto local = detail::parallel_terms(th, qa, qb, 2 * s, 2 * s + 1);
    std::vector<ExecutableTerm> next;
    for (const auto& t : acc)
      for (const auto& lt : local) {
        ExecutableTerm u = t;
        u.weight *= lt.weight;
        if (std::abs(u.weight) < kWeightTolerance) continue;
        u.ops_a.push_back(lt.a);
        u.ops_b.push_back(lt.b);
        u.sign_bits_a.insert(u.sign_bits_a.end(), lt.sign_a.begin(), lt.sign_a.end());
        u.sign_bits_b.insert(u.sign_bits_b.end(), lt.sign_b.begin(), lt.sign_b.end());
        u.label += (s ? "|" : "") + lt.label;
        next.push_back(std::move(u));
      }
    acc = std::move(next);
  }
  if (g.size() == 0) acc.front().label = "identity";
  d.terms = std::move(acc);
  d.gamma = gamma_independent(g.thetas);
  return d;
}

/// Ancilla register order of the B half of the joint resource: the resource
/// is sum_j c_j |j_1..j_n>_A |j_n..j_1>_B, so the B register lists the
/// ancillas of the gates in reverse. This is the only place the reversal
/// lives; read through it, gate s's B ancilla carries j_s.
inline std::vector<std::size_t> joint_b_register(std::size_t first_b_ancilla, std::size_t n) {
  std::vector<std::size_t> reg;
  for (std::size_t p = 0; p < n; ++p) reg.push_back(first_b_ancilla + (n - 1 - p));
  return reg;
}

inline std::size_t reverse_bits(std::size_t x, std::size_t n) {
  std::size_t r = 0;
  for (std::size_t s = 0; s < n; ++s)
    if ((x >> s) & 1U) r |= std::size_t{1} << (n - 1 - s);
  return r;
}

/// QPD of the joint teleportation resource over the computational-basis
/// expansion (not an SVD basis: degenerate coefficients would make the
/// local bases, and hence the outcome-sign rule, ill-defined).
inline QPD joint_resource_qpd(std::span<const double> thetas, int alpha) {
  const std::size_t n = thetas.size();
  const auto c = resource_coefficients(thetas);
  std::vector<Statevector> left, right;
  for (std::size_t j = 0; j < c.size(); ++j) {
    left.push_back(Statevector::basis(c.size(), j));
    right.push_back(Statevector::basis(c.size(), reverse_bits(j, n)));
  }
  QPD q = qpd_from_expansion(c, left, right, alpha);
  q.gamma = gamma_joint(thetas);
  q.target_description = "joint teleportation resource, " + std::to_string(n) + " gates";
  return q;
}

/// Joint virtual teleportation of all gates in the group. Gate s uses A
/// ancilla N + s and B ancilla N + n + s (N data qubits) and writes k_s to
/// bit 2s, l_s to bit 2s + 1; its ancillas are measured right after its block.
inline CutDecomposition cut_joint_teleport(const Circuit& c, const GateGroup& g, int alpha = 4) {
  auto d = detail::start_decomposition(c, g, CutScheme::JointTeleport);
  const std::size_t n = g.size();
  const std::size_t N = c.num_qubits;
  if (n == 0) {
    d.terms.push_back({1.0, {}, {}, {}, {}, "identity"});
    return d;
  }
  d.ancillas_per_partition = n;
  d.num_classical_bits = 2 * n;
  d.partition.insert(d.partition.end(), n, Partition::A);
  d.partition.insert(d.partition.end(), n, Partition::B);
  std::vector<std::size_t> reg_a(n);
  std::iota(reg_a.begin(), reg_a.end(), N);
  const auto reg_b = joint_b_register(N + n, n);

  const QPD q = joint_resource_qpd(g.thetas, alpha);
  for (const auto& qt : q.terms) {
    if (std::abs(qt.coefficient) < kWeightTolerance) continue;
    ExecutableTerm t;
    t.weight = qt.coefficient;
    t.label = qt.label.str();
    t.ops_a.assign(n, {});
    t.ops_b.assign(n, {});
    t.ops_a[0].push_back(Gate::prepare(reg_a, qt.state_a));
    t.ops_b[0].push_back(Gate::prepare(reg_b, qt.state_b));
    for (std::size_t s = 0; s < n; ++s) {
      for (auto& x : virtual_teleport_block_a(g.qubits_a[s], N + s, 2 * s)) t.ops_a[s].push_back(x);
      for (auto& x : virtual_teleport_block_b(g.qubits_b[s], N + n + s, 2 * s + 1)) t.ops_b[s].push_back(x);
    }
    const std::uint64_t mask = qt.sign_mask();
    for (std::size_t s = 0; s < n; ++s)
      if ((mask >> (n - 1 - s)) & 1U) {
        t.sign_bits_a.push_back(2 * s);
        t.sign_bits_b.push_back(2 * s + 1);
      }
    d.terms.push_back(std::move(t));
  }
  d.gamma = q.gamma;
  return d;
}

inline CutDecomposition cut_joint_teleport(std::span<const double> thetas, int alpha = 4) {
  const auto c = rzz_layer_circuit(thetas);
  std::vector<std::size_t> idx(thetas.size());
  std::iota(idx.begin(), idx.end(), 0);
  return cut_joint_teleport(c, make_gate_group(c, idx), alpha);
}

// ---------------------------------------------------------------------------
// Fragments

/// One partition's circuit for one term, on local qubit indices.
struct Fragment {
  Circuit circuit;
  std::vector<std::size_t> global_qubits;  ///< local index -> extended index
  std::vector<std::size_t> data_local;     ///< local indices of data qubits, ascending global order
  std::vector<std::size_t> data_global;
};

inline Fragment build_fragment(const CutDecomposition& d, std::size_t term, Partition side) {
  const ExecutableTerm& t = d.terms.at(term);
  Fragment f;
  std::vector<std::size_t> local(d.total_qubits(), SIZE_MAX);
  for (std::size_t q = 0; q < d.total_qubits(); ++q) {
    if (d.partition[q] != side) continue;
    local[q] = f.global_qubits.size();
    if (q < d.data_qubits()) {
      f.data_local.push_back(f.global_qubits.size());
      f.data_global.push_back(q);
    }
    f.global_qubits.push_back(q);
  }
  f.circuit.num_qubits = f.global_qubits.size();
  f.circuit.partition.assign(f.circuit.num_qubits, side);
  f.circuit.num_classical_bits = d.num_classical_bits;
  f.circuit.sign_bits = side == Partition::A ? t.sign_bits_a : t.sign_bits_b;
  auto remap = [&](Gate g) {
    for (auto& q : g.qubits) {
      if (q >= local.size() || local[q] == SIZE_MAX) {
        throw std::logic_error("fragment: operation touches a qubit outside its partition");
      }
      q = local[q];
    }
    return g;
  };
  const auto& ops = side == Partition::A ? t.ops_a : t.ops_b;
  std::size_t slot = 0;
  for (std::size_t gi = 0; gi < d.base.gates.size(); ++gi) {
    const Gate& g = d.base.gates[gi];
    if (slot < d.group.size() && d.group.gate_indices[slot] == gi) {
      if (slot < ops.size())
        for (const auto& x : ops[slot]) f.circuit.add(remap(x));
      ++slot;
      continue;
    }
    if (crosses_partition(g, d.partition)) {
      throw std::invalid_argument("fragment: uncut gate " + std::to_string(gi) + " crosses the partition");
    }
    if (d.partition[g.qubits[0]] == side) f.circuit.add(remap(g));
  }
  return f;
}

/// Both fragments laid out on the extended register, for validation.
inline Circuit assemble_term_circuit(const CutDecomposition& d, std::size_t term) {
  const ExecutableTerm& t = d.terms.at(term);
  Circuit c;
  c.num_qubits = d.total_qubits();
  c.partition = d.partition;
  c.num_classical_bits = d.num_classical_bits;
  c.sign_bits = t.outcome_sign_bits();
  std::size_t slot = 0;
  for (std::size_t gi = 0; gi < d.base.gates.size(); ++gi) {
    if (slot < d.group.size() && d.group.gate_indices[slot] == gi) {
      if (slot < t.ops_a.size()) c.add(t.ops_a[slot]);
      if (slot < t.ops_b.size()) c.add(t.ops_b[slot]);
      ++slot;
      continue;
    }
    c.add(d.base.gates[gi]);
  }
  return c;
}

/// Operational communication-freeness: A ops stay on A, B ops on B, no
/// conditioned gate reads the other side's measurement, and each side's sign
/// bits are written by that side.
inline bool term_is_communication_free(const CutDecomposition& d, std::size_t term) {
  const ExecutableTerm& t = d.terms.at(term);
  for (const auto& [ops, side] : {std::pair{&t.ops_a, Partition::A}, std::pair{&t.ops_b, Partition::B}})
    for (const auto& slot : *ops)
      for (const auto& g : slot)
        for (auto q : g.qubits)
          if (q >= d.partition.size() || d.partition[q] != side) return false;
  const Circuit c = assemble_term_circuit(d, term);
  if (!is_communication_free(c)) return false;
  const auto src = measured_qubit_of_bits(c);
  for (const auto& [bits, side] : {std::pair{&t.sign_bits_a, Partition::A}, std::pair{&t.sign_bits_b, Partition::B}})
    for (auto b : *bits)
      if (b >= src.size() || !src[b] || d.partition[*src[b]] != side) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Exact reconstruction

struct ReconstructOptions {
  bool apply_signs = true;
  /// Restrict every term to branches with these classical outcomes.
  std::vector<std::pair<std::size_t, int>> fixed_bits;
  /// Refuse to build superoperators on more data qubits than this.
  std::size_t max_data_qubits = 6;
};

namespace detail {

struct SparseEntry {
  std::size_t row_i, row_j, col_k, col_l;  // local (i, j) row and (k, l) column of vec convention
  Complex value;
};

inline std::vector<SparseEntry> sparse_superop(const SuperOperator& s) {
  const std::size_t d = s.dimension();
  const Matrix& m = s.matrix();
  std::vector<SparseEntry> out;
  for (std::size_t r = 0; r < d * d; ++r)
    for (std::size_t c = 0; c < d * d; ++c) {
      const Complex v = m(r, c);
      if (std::abs(v) > 1e-15) out.push_back({r % d, r / d, c % d, c / d, v});
    }
  return out;
}

}  // namespace detail

/// sum_t w_t S_A,t (x) S_B,t on the data qubits (ancillas traced out after
/// branch accounting), arranged on the base circuit's qubit order.
inline SuperOperator reconstruct_channel(const CutDecomposition& d, const ReconstructOptions& opt = {}) {
  const std::size_t N = d.data_qubits();
  if (N > opt.max_data_qubits) throw std::length_error("reconstruct_channel: too many data qubits");
  const std::size_t D = std::size_t{1} << N;
  Matrix total(D * D, D * D);
  if (d.terms.empty()) return SuperOperator(std::move(total));

  std::vector<std::size_t> qa, qb;
  for (std::size_t q = 0; q < N; ++q) (d.partition[q] == Partition::A ? qa : qb).push_back(q);
  const std::size_t da = std::size_t{1} << qa.size(), db = std::size_t{1} << qb.size();
  // compose[a * db + b] = global index with A bits a and B bits b.
  std::vector<std::size_t> compose(da * db);
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t b = 0; b < db; ++b) {
      std::size_t x = 0;
      for (std::size_t k = 0; k < qa.size(); ++k)
        if ((a >> (qa.size() - 1 - k)) & 1U) x |= detail::qubit_mask(N, qa[k]);
      for (std::size_t k = 0; k < qb.size(); ++k)
        if ((b >> (qb.size() - 1 - k)) & 1U) x |= detail::qubit_mask(N, qb[k]);
      compose[a * db + b] = x;
    }

  auto side_channel = [&](std::size_t term, Partition side) {
    const Fragment f = build_fragment(d, term, side);
    ChannelOptions co;
    co.apply_signs = opt.apply_signs;
    const auto src = measured_qubit_of_bits(f.circuit);
    for (const auto& [bit, val] : opt.fixed_bits)
      if (bit < src.size() && src[bit]) co.fixed_bits.emplace_back(bit, val);
    return detail::sparse_superop(signed_channel(f.circuit, f.data_local, co));
  };

  for (std::size_t t = 0; t < d.terms.size(); ++t) {
    const double w = d.terms[t].weight;
    const auto sa = side_channel(t, Partition::A);
    const auto sb = side_channel(t, Partition::B);
    for (const auto& ea : sa)
      for (const auto& eb : sb) {
        const std::size_t i = compose[ea.row_i * db + eb.row_i], j = compose[ea.row_j * db + eb.row_j];
        const std::size_t k = compose[ea.col_k * db + eb.col_k], l = compose[ea.col_l * db + eb.col_l];
        total(i + j * D, k + l * D) += w * ea.value * eb.value;
      }
  }
  return SuperOperator(std::move(total));
}

}  // namespace qcut
