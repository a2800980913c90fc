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

// Circuit representation and a dense statevector simulator with mid-circuit
// measurement, classically conditioned Paulis and direct ancilla
// initialization. Two execution modes are provided:
//   * simulate_statevector: one sampled trajectory (a shot);
//   * enumerate_branches:   every measurement branch kept, unnormalized, as a
//                           linear operator; this is the exact channel oracle.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcut/rng.hpp"
#include "qcut/tensor.hpp"

namespace qcut {

enum class GateKind {
  H,
  S,
  Sdg,
  X,
  Z,
  RZ,
  RZZ,
  MultiRZ,
  CNOT,
  PrepareState,
  MeasureZ,
  ConditionedPauli,
};

enum class Pauli { X, Z };

enum class Partition : std::uint8_t { A, B };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::Sdg: return "sdg";
    case GateKind::X: return "x";
    case GateKind::Z: return "z";
    case GateKind::RZ: return "rz";
    case GateKind::RZZ: return "rzz";
    case GateKind::MultiRZ: return "mrz";
    case GateKind::CNOT: return "cnot";
    case GateKind::PrepareState: return "prep";
    case GateKind::MeasureZ: return "measure";
    case GateKind::ConditionedPauli: return "cond";
  }
  return "?";
}

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<std::size_t> qubits;
  double angle = 0.0;               ///< RZ, RZZ, MultiRZ (radians)
  std::vector<Complex> amplitudes;  ///< PrepareState
  std::size_t bit = 0;              ///< MeasureZ target / ConditionedPauli source
  Pauli pauli = Pauli::X;           ///< ConditionedPauli

  static Gate h(std::size_t q) { return make(GateKind::H, {q}); }
  static Gate s(std::size_t q) { return make(GateKind::S, {q}); }
  static Gate sdg(std::size_t q) { return make(GateKind::Sdg, {q}); }
  static Gate x(std::size_t q) { return make(GateKind::X, {q}); }
  static Gate z(std::size_t q) { return make(GateKind::Z, {q}); }
  static Gate rz(std::size_t q, double angle) { return make(GateKind::RZ, {q}, angle); }
  static Gate rzz(std::size_t q0, std::size_t q1, double angle) { return make(GateKind::RZZ, {q0, q1}, angle); }
  static Gate multi_rz(std::vector<std::size_t> qs, double angle) { return make(GateKind::MultiRZ, std::move(qs), angle); }
  static Gate cnot(std::size_t control, std::size_t target) { return make(GateKind::CNOT, {control, target}); }
  static Gate prepare(std::vector<std::size_t> reg, std::vector<Complex> amps) {
    Gate g = make(GateKind::PrepareState, std::move(reg));
    g.amplitudes = std::move(amps);
    return g;
  }
  static Gate prepare(std::vector<std::size_t> reg, const Statevector& s) {
    return prepare(std::move(reg), std::vector<Complex>(s.amplitudes().begin(), s.amplitudes().end()));
  }
  static Gate measure(std::size_t q, std::size_t bit) {
    Gate g = make(GateKind::MeasureZ, {q});
    g.bit = bit;
    return g;
  }
  static Gate conditioned(Pauli p, std::size_t q, std::size_t bit) {
    Gate g = make(GateKind::ConditionedPauli, {q});
    g.bit = bit;
    g.pauli = p;
    return g;
  }

  bool is_unitary() const {
    return kind != GateKind::PrepareState && kind != GateKind::MeasureZ && kind != GateKind::ConditionedPauli;
  }

  friend bool operator==(const Gate&, const Gate&) = default;

 private:
  static Gate make(GateKind k, std::vector<std::size_t> qs, double angle = 0.0) {
    Gate g;
    g.kind = k;
    g.qubits = std::move(qs);
    g.angle = angle;
    return g;
  }
};

struct Circuit {
  std::size_t num_qubits = 0;
  std::vector<Partition> partition;  ///< one tag per qubit; empty means "untagged"
  std::vector<Gate> gates;
  std::size_t num_classical_bits = 0;
  /// Classical bits whose measured parity flips the shot's sign factor.
  std::vector<std::size_t> sign_bits;

  Circuit& add(Gate g) {
    gates.push_back(std::move(g));
    return *this;
  }
  Circuit& add(std::span<const Gate> gs) {
    gates.insert(gates.end(), gs.begin(), gs.end());
    return *this;
  }

  bool has_measurements() const {
    for (const auto& g : gates)
      if (g.kind == GateKind::MeasureZ) return true;
    return false;
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct ShotRecord {
  std::vector<std::int8_t> bits;  ///< -1 = never written
  int sign_factor = 1;

  int bit(std::size_t i) const {
    if (i >= bits.size() || bits[i] < 0) throw std::logic_error("classical bit " + std::to_string(i) + " was not written");
    return bits[i];
  }

  friend bool operator==(const ShotRecord&, const ShotRecord&) = default;
};

// ---------------------------------------------------------------------------
// Validation

/// Throws std::invalid_argument describing the first violated invariant.
inline void validate(const Circuit& c) {
  if (!c.partition.empty() && c.partition.size() != c.num_qubits) {
    throw std::invalid_argument("circuit: partition must tag every qubit");
  }
  std::vector<bool> written(c.num_classical_bits, false);
  for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
    const Gate& g = c.gates[gi];
    const std::string where = "gate " + std::to_string(gi) + " (" + to_string(g.kind) + ")";
    std::size_t expected = 0;
    switch (g.kind) {
      case GateKind::RZZ:
      case GateKind::CNOT: expected = 2; break;
      case GateKind::MultiRZ:
      case GateKind::PrepareState: expected = 0; break;
      default: expected = 1; break;
    }
    if (expected != 0 && g.qubits.size() != expected) throw std::invalid_argument(where + ": wrong qubit count");
    if (g.qubits.empty()) throw std::invalid_argument(where + ": no qubits");
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      if (g.qubits[i] >= c.num_qubits) throw std::invalid_argument(where + ": qubit index out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (g.qubits[i] == g.qubits[j]) throw std::invalid_argument(where + ": repeated qubit");
    }
    if (g.kind == GateKind::PrepareState) {
      if (g.amplitudes.size() != (std::size_t{1} << g.qubits.size())) {
        throw std::invalid_argument(where + ": amplitude count must be 2^register size");
      }
      double n = 0.0;
      for (const auto& a : g.amplitudes) n += std::norm(a);
      if (std::abs(std::sqrt(n) - 1.0) > kStateTolerance) throw std::invalid_argument(where + ": amplitudes not normalized");
    }
    if (g.kind == GateKind::MeasureZ) {
      if (g.bit >= c.num_classical_bits) throw std::invalid_argument(where + ": classical bit out of range");
      if (written[g.bit]) throw std::invalid_argument(where + ": classical bits are write-once");
      written[g.bit] = true;
    }
    if (g.kind == GateKind::ConditionedPauli) {
      if (g.bit >= c.num_classical_bits || !written[g.bit]) {
        throw std::invalid_argument(where + ": reads a classical bit no earlier measurement wrote");
      }
    }
  }
  for (auto b : c.sign_bits)
    if (b >= c.num_classical_bits) throw std::invalid_argument("circuit: sign bit out of range");
}

/// Qubit measured into each classical bit, if any.
inline std::vector<std::optional<std::size_t>> measured_qubit_of_bits(const Circuit& c) {
  std::vector<std::optional<std::size_t>> src(c.num_classical_bits);
  for (const auto& g : c.gates)
    if (g.kind == GateKind::MeasureZ && g.bit < src.size()) src[g.bit] = g.qubits[0];
  return src;
}

/// True iff no conditioned Pauli (and no sign bit) couples the partitions:
/// every conditioned gate's target lies in the partition of the qubit whose
/// measurement it reads. Untagged circuits are trivially communication-free.
inline bool is_communication_free(const Circuit& c) {
  if (c.partition.empty()) return true;
  const auto src = measured_qubit_of_bits(c);
  for (const auto& g : c.gates) {
    if (g.kind != GateKind::ConditionedPauli) continue;
    if (g.bit >= src.size() || !src[g.bit]) return false;
    if (c.partition[*src[g.bit]] != c.partition[g.qubits[0]]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Kernels

namespace detail {

inline std::size_t qubit_mask(std::size_t n, std::size_t q) { return std::size_t{1} << (n - 1 - q); }

inline void apply_1q(std::span<Complex> v, std::size_t n, std::size_t q, Complex m00, Complex m01, Complex m10,
                     Complex m11) {
  const std::size_t mask = qubit_mask(n, q);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & mask) continue;
    const Complex a = v[i], b = v[i | mask];
    v[i] = m00 * a + m01 * b;
    v[i | mask] = m10 * a + m11 * b;
  }
}

inline void apply_x(std::span<Complex> v, std::size_t n, std::size_t q) {
  const std::size_t mask = qubit_mask(n, q);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(i & mask)) std::swap(v[i], v[i | mask]);
}

inline void apply_phase_on_one(std::span<Complex> v, std::size_t n, std::size_t q, Complex phase) {
  const std::size_t mask = qubit_mask(n, q);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i & mask) v[i] *= phase;
}

inline void apply_cnot(std::span<Complex> v, std::size_t n, std::size_t control, std::size_t target) {
  const std::size_t cm = qubit_mask(n, control), tm = qubit_mask(n, target);
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((i & cm) && !(i & tm)) std::swap(v[i], v[i | tm]);
}

/// exp(-i angle/2 Z^{(x)|qs|})
inline void apply_zstring_rotation(std::span<Complex> v, std::size_t n, std::span<const std::size_t> qs, double angle) {
  std::size_t mask = 0;
  for (auto q : qs) mask |= qubit_mask(n, q);
  const Complex even = std::polar(1.0, -angle / 2), odd = std::polar(1.0, angle / 2);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= (std::popcount(i & mask) & 1) ? odd : even;
}

/// Initializes `reg` (assumed |0...0>) to amps. Returns the weight that was
/// found outside the all-zero register subspace (should be ~0).
inline double apply_prepare(std::vector<Complex>& v, std::size_t n, std::span<const std::size_t> reg,
                            std::span<const Complex> amps) {
  std::size_t reg_mask = 0;
  for (auto q : reg) reg_mask |= qubit_mask(n, q);
  std::vector<std::size_t> spread(amps.size());
  for (std::size_t x = 0; x < amps.size(); ++x) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < reg.size(); ++k)
      if ((x >> (reg.size() - 1 - k)) & 1U) m |= qubit_mask(n, reg[k]);
    spread[x] = m;
  }
  double stray = 0.0;
  std::vector<Complex> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & reg_mask) {
      stray += std::norm(v[i]);
      continue;
    }
    if (v[i] == Complex{}) continue;
    for (std::size_t x = 0; x < amps.size(); ++x) out[i | spread[x]] = v[i] * amps[x];
  }
  v.swap(out);
  return stray;
}

inline double probability_of_one(std::span<const Complex> v, std::size_t n, std::size_t q) {
  const std::size_t mask = qubit_mask(n, q);
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i & mask) p += std::norm(v[i]);
  return p;
}

/// Zeroes amplitudes inconsistent with `outcome` and scales the rest.
inline void project(std::span<Complex> v, std::size_t n, std::size_t q, int outcome, double scale) {
  const std::size_t mask = qubit_mask(n, q);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const bool one = (i & mask) != 0;
    if (one != (outcome == 1)) v[i] = 0.0;
    else v[i] *= scale;
  }
}

/// Applies a unitary gate in place.
inline void apply_unitary(std::span<Complex> v, std::size_t n, const Gate& g) {
  static const double h = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::H: apply_1q(v, n, g.qubits[0], h, h, h, -h); break;
    case GateKind::S: apply_phase_on_one(v, n, g.qubits[0], Complex{0.0, 1.0}); break;
    case GateKind::Sdg: apply_phase_on_one(v, n, g.qubits[0], Complex{0.0, -1.0}); break;
    case GateKind::X: apply_x(v, n, g.qubits[0]); break;
    case GateKind::Z: apply_phase_on_one(v, n, g.qubits[0], -1.0); break;
    case GateKind::RZ:
    case GateKind::RZZ:
    case GateKind::MultiRZ: apply_zstring_rotation(v, n, g.qubits, g.angle); break;
    case GateKind::CNOT: apply_cnot(v, n, g.qubits[0], g.qubits[1]); break;
    default: throw std::logic_error("apply_unitary: gate is not unitary");
  }
}

inline void apply_conditioned(std::span<Complex> v, std::size_t n, const Gate& g) {
  if (g.pauli == Pauli::X) apply_x(v, n, g.qubits[0]);
  else apply_phase_on_one(v, n, g.qubits[0], -1.0);
}

inline int sign_of(const ShotRecord& r, std::span<const std::size_t> sign_bits) {
  int parity = 0;
  for (auto b : sign_bits) parity ^= r.bit(b);
  return parity ? -1 : 1;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shot simulation

struct SimulationResult {
  Statevector state;
  ShotRecord record;
};

namespace detail {

/// Runs gates[first, last) on v, drawing measurement outcomes from rng.
inline void run_gates(std::vector<Complex>& v, std::size_t n, std::span<const Gate> gates, ShotRecord& rec,
                      CounterRng& rng) {
  for (const Gate& g : gates) {
    switch (g.kind) {
      case GateKind::PrepareState: {
        const double stray = apply_prepare(v, n, g.qubits, g.amplitudes);
        if (stray > kStateTolerance) throw std::logic_error("PrepareState: register was not in |0...0>");
        break;
      }
      case GateKind::MeasureZ: {
        const double p1 = probability_of_one(v, n, g.qubits[0]);
        const int outcome = rng.uniform() < p1 ? 1 : 0;
        const double p = outcome ? p1 : 1.0 - p1;
        project(v, n, g.qubits[0], outcome, 1.0 / std::sqrt(p));
        rec.bits[g.bit] = static_cast<std::int8_t>(outcome);
        break;
      }
      case GateKind::ConditionedPauli:
        if (rec.bit(g.bit)) apply_conditioned(v, n, g);
        break;
      default: apply_unitary(v, n, g);
    }
  }
}

}  // namespace detail

/// One trajectory of `c` from |0...0>. Measurement outcomes follow the Born
/// rule, drawn from a counter-based stream keyed by `seed`.
inline SimulationResult simulate_statevector(const Circuit& c, std::uint64_t seed) {
  validate(c);
  std::vector<Complex> v(std::size_t{1} << c.num_qubits);
  v[0] = 1.0;
  ShotRecord rec;
  rec.bits.assign(c.num_classical_bits, -1);
  CounterRng rng(seed);
  detail::run_gates(v, c.num_qubits, c.gates, rec, rng);
  rec.sign_factor = detail::sign_of(rec, c.sign_bits);
  return {Statevector::normalized(std::move(v)), std::move(rec)};
}

/// Basis index sampled from |amplitude|^2 with one uniform draw.
inline std::size_t sample_basis_state(std::span<const Complex> v, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += std::norm(v[i]);
    if (u < acc) return i;
  }
  // Rounding can leave acc slightly below 1; fall back to the last populated index.
  for (std::size_t i = v.size(); i-- > 0;)
    if (v[i] != Complex{}) return i;
  return 0;
}

/// Diagonal observable: a function of the computational basis index.
using BitstringFunction = std::function<double(std::uint64_t)>;

/// sum_s |<s|psi_out>|^2 f(s) for a measurement-free circuit.
inline double exact_expectation(const Circuit& c, const BitstringFunction& f) {
  if (c.has_measurements()) throw std::invalid_argument("exact_expectation: circuit contains measurements");
  const auto out = simulate_statevector(c, 0).state;
  double e = 0.0;
  for (std::size_t s = 0; s < out.dimension(); ++s) {
    const double p = std::norm(out[s]);
    if (p == 0.0) continue;
    const double fs = f(s);
    if (!(fs >= -1.0 && fs <= 1.0)) throw std::domain_error("exact_expectation: f(s) outside [-1, 1]");
    e += p * fs;
  }
  return e;
}

/// Dense unitary of a circuit made of unitary gates only.
inline Matrix circuit_unitary(const Circuit& c) {
  validate(c);
  const std::size_t d = std::size_t{1} << c.num_qubits;
  Matrix u(d, d);
  std::vector<Complex> col(d);
  for (std::size_t in = 0; in < d; ++in) {
    std::fill(col.begin(), col.end(), Complex{});
    col[in] = 1.0;
    for (const auto& g : c.gates) {
      if (!g.is_unitary()) throw std::invalid_argument("circuit_unitary: circuit has non-unitary operations");
      detail::apply_unitary(col, c.num_qubits, g);
    }
    for (std::size_t r = 0; r < d; ++r) u(r, in) = col[r];
  }
  return u;
}

// ---------------------------------------------------------------------------
// Exact branch expansion

/// One measurement history with the (unnormalized) linear map it induces.
struct Branch {
  std::vector<std::int8_t> bits;
  /// columns[in] = image of the input basis state `in` of the io register,
  /// other qubits starting in |0>, as a full 2^n amplitude vector.
  std::vector<std::vector<Complex>> columns;

  int sign(std::span<const std::size_t> sign_bits) const {
    int parity = 0;
    for (auto b : sign_bits) parity ^= bits.at(b) > 0 ? 1 : 0;
    return parity ? -1 : 1;
  }
};

/// Keeps every measurement outcome. `io` lists the qubits that receive input
/// basis states; branches whose operator vanishes identically are dropped.
inline std::vector<Branch> enumerate_branches(const Circuit& c, std::span<const std::size_t> io) {
  validate(c);
  const std::size_t n = c.num_qubits;
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t din = std::size_t{1} << io.size();
  Branch root;
  root.bits.assign(c.num_classical_bits, -1);
  root.columns.assign(din, std::vector<Complex>(dim));
  for (std::size_t in = 0; in < din; ++in) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < io.size(); ++k)
      if ((in >> (io.size() - 1 - k)) & 1U) idx |= detail::qubit_mask(n, io[k]);
    root.columns[in][idx] = 1.0;
  }
  std::vector<Branch> live{std::move(root)};
  for (const Gate& g : c.gates) {
    std::vector<Branch> next;
    for (auto& br : live) {
      switch (g.kind) {
        case GateKind::PrepareState:
          for (auto& col : br.columns) {
            double w = 0.0;
            for (const auto& a : col) w += std::norm(a);
            const double stray = detail::apply_prepare(col, n, g.qubits, g.amplitudes);
            if (stray > kStateTolerance * std::max(1.0, w)) throw std::logic_error("PrepareState: register was not in |0...0>");
          }
          next.push_back(std::move(br));
          break;
        case GateKind::MeasureZ:
          for (int outcome : {0, 1}) {
            Branch b = br;
            double w = 0.0;
            for (auto& col : b.columns) {
              detail::project(col, n, g.qubits[0], outcome, 1.0);
              for (const auto& a : col) w += std::norm(a);
            }
            if (w < 1e-28) continue;
            b.bits[g.bit] = static_cast<std::int8_t>(outcome);
            next.push_back(std::move(b));
          }
          break;
        case GateKind::ConditionedPauli:
          if (br.bits[g.bit] == 1)
            for (auto& col : br.columns) detail::apply_conditioned(col, n, g);
          next.push_back(std::move(br));
          break;
        default:
          for (auto& col : br.columns) detail::apply_unitary(col, n, g);
          next.push_back(std::move(br));
      }
    }
    live = std::move(next);
  }
  return live;
}

/// Kraus operators (io -> io) of one branch with all other qubits traced out.
inline std::vector<Matrix> branch_kraus(const Branch& br, std::size_t num_qubits, std::span<const std::size_t> io) {
  const std::size_t n = num_qubits;
  std::vector<bool> is_io(n, false);
  for (auto q : io) is_io[q] = true;
  std::vector<std::size_t> traced;
  for (std::size_t q = 0; q < n; ++q)
    if (!is_io[q]) traced.push_back(q);
  const std::size_t dio = std::size_t{1} << io.size();
  const std::size_t dtr = std::size_t{1} << traced.size();
  auto spread = [&](std::span<const std::size_t> reg, std::size_t x) {
    std::size_t m = 0;
    for (std::size_t k = 0; k < reg.size(); ++k)
      if ((x >> (reg.size() - 1 - k)) & 1U) m |= detail::qubit_mask(n, reg[k]);
    return m;
  };
  std::vector<std::size_t> io_idx(dio), tr_idx(dtr);
  for (std::size_t x = 0; x < dio; ++x) io_idx[x] = spread(io, x);
  for (std::size_t x = 0; x < dtr; ++x) tr_idx[x] = spread(traced, x);

  std::vector<Matrix> out;
  for (std::size_t t = 0; t < dtr; ++t) {
    Matrix k(dio, dio);
    bool any = false;
    for (std::size_t in = 0; in < dio; ++in)
      for (std::size_t o = 0; o < dio; ++o) {
        const Complex a = br.columns[in][io_idx[o] | tr_idx[t]];
        if (a != Complex{}) {
          k(o, in) = a;
          any = true;
        }
      }
    if (any) out.push_back(std::move(k));
  }
  return out;
}

struct ChannelOptions {
  bool apply_signs = true;
  /// Keep only branches whose listed classical bits take the given values.
  std::vector<std::pair<std::size_t, int>> fixed_bits;
};

/// Signed sum over measurement branches of the channel on `io`, with every
/// other qubit traced out:  sum_branch sign(branch) sum_x conj(K_x) (x) K_x.
inline SuperOperator signed_channel(const Circuit& c, std::span<const std::size_t> io, const ChannelOptions& opt = {}) {
  const std::size_t d = std::size_t{1} << io.size();
  Matrix s(d * d, d * d);
  for (const auto& br : enumerate_branches(c, io)) {
    bool keep = true;
    for (const auto& [bit, val] : opt.fixed_bits)
      if (br.bits.at(bit) != val) keep = false;
    if (!keep) continue;
    const double w = opt.apply_signs ? br.sign(c.sign_bits) : 1.0;
    for (const auto& k : branch_kraus(br, c.num_qubits, io)) detail::accumulate_kraus(s, k, w);
  }
  return SuperOperator(std::move(s));
}

// ---------------------------------------------------------------------------
// Gate-sequence builders

/// CNOT ladder accumulating the parity of `qubits` into the last one.
inline std::vector<Gate> parity_ladder(std::span<const std::size_t> qubits) {
  std::vector<Gate> out;
  for (std::size_t k = 0; k + 1 < qubits.size(); ++k) out.push_back(Gate::cnot(qubits[k], qubits[k + 1]));
  return out;
}

inline std::vector<Gate> reversed(std::vector<Gate> gs) {
  std::reverse(gs.begin(), gs.end());
  return gs;
}

/// CNOT ladder + RZ + reversed ladder realizing exp(-i angle/2 Z^{(x)n});
/// uses 2(n-1) CNOTs.
inline std::vector<Gate> build_multi_rz_ladder(double angle, std::span<const std::size_t> qubits) {
  if (qubits.empty()) throw std::invalid_argument("build_multi_rz_ladder: empty qubit list");
  auto ladder = parity_ladder(qubits);
  std::vector<Gate> out = ladder;
  out.push_back(Gate::rz(qubits.back(), angle));
  for (auto& g : reversed(ladder)) out.push_back(std::move(g));
  return out;
}

/// Parity-measurement instrument: branch k applies (I + (-1)^k Z^{(x)t}) / 2.
inline std::vector<Gate> build_parity_instrument(std::span<const std::size_t> qubits, std::size_t bit) {
  if (qubits.empty()) throw std::invalid_argument("build_parity_instrument: empty qubit list");
  auto ladder = parity_ladder(qubits);
  std::vector<Gate> out = ladder;
  out.push_back(Gate::measure(qubits.back(), bit));
  for (auto& g : reversed(ladder)) out.push_back(std::move(g));
  return out;
}

inline std::size_t count_cnots(std::span<const Gate> gs) {
  return static_cast<std::size_t>(std::count_if(gs.begin(), gs.end(), [](const Gate& g) { return g.kind == GateKind::CNOT; }));
}

// ---------------------------------------------------------------------------
// Teleportation circuits

/// Qubit roles shared by the two teleportation builders below.
struct TeleportLayout {
  static constexpr std::size_t data_a = 0;
  static constexpr std::size_t ancilla_a = 1;
  static constexpr std::size_t ancilla_b = 2;
  static constexpr std::size_t data_b = 3;
  static constexpr std::size_t bit_k = 0;
  static constexpr std::size_t bit_l = 1;
  static std::vector<Partition> partition() { return {Partition::A, Partition::A, Partition::B, Partition::B}; }
};

/// Two-way-communication teleportation of R_zz(theta) through a Bell pair:
/// A copies its data parity onto its ancilla and measures k; B fixes its
/// ancilla with X^k, applies R_zz(theta) locally, measures l in the X basis;
/// A corrects with Z^l.
inline Circuit build_gate_teleportation(double theta) {
  using L = TeleportLayout;
  const double h = 1.0 / std::sqrt(2.0);
  Circuit c;
  c.num_qubits = 4;
  c.partition = L::partition();
  c.num_classical_bits = 2;
  c.add(Gate::prepare({L::ancilla_a, L::ancilla_b}, std::vector<Complex>{h, 0.0, 0.0, h}))
      .add(Gate::cnot(L::data_a, L::ancilla_a))
      .add(Gate::measure(L::ancilla_a, L::bit_k))
      .add(Gate::conditioned(Pauli::X, L::ancilla_b, L::bit_k))
      .add(Gate::rzz(L::ancilla_b, L::data_b, theta))
      .add(Gate::h(L::ancilla_b))
      .add(Gate::measure(L::ancilla_b, L::bit_l))
      .add(Gate::conditioned(Pauli::Z, L::data_a, L::bit_l));
  return c;
}

/// A-side block of virtual gate teleportation: ancilla H, data->ancilla
/// CNOT, computational-basis readout of the ancilla.
inline std::vector<Gate> virtual_teleport_block_a(std::size_t data, std::size_t ancilla, std::size_t bit) {
  return {Gate::h(ancilla), Gate::cnot(data, ancilla), Gate::measure(ancilla, bit)};
}

/// B-side block: ancilla S^dag then H, data->ancilla CNOT, readout.
inline std::vector<Gate> virtual_teleport_block_b(std::size_t data, std::size_t ancilla, std::size_t bit) {
  return {Gate::sdg(ancilla), Gate::h(ancilla), Gate::cnot(data, ancilla), Gate::measure(ancilla, bit)};
}

/// cos(theta/2)|00> + sin(theta/2)|11>
inline Statevector virtual_teleportation_resource(double theta) {
  return Statevector::from_amplitudes({std::cos(theta / 2), 0.0, 0.0, std::sin(theta / 2)});
}

/// Virtual teleportation on the TeleportLayout with a (possibly entangled)
/// two-qubit resource on the ancillas. With the resource above, outcome
/// branches k == l carry R_zz(theta) and k != l carry R_zz(-theta).
inline Circuit build_virtual_teleportation_circuit(const Statevector& resource) {
  using L = TeleportLayout;
  if (resource.dimension() != 4) throw std::invalid_argument("virtual teleportation: resource must be a two-qubit state");
  Circuit c;
  c.num_qubits = 4;
  c.partition = L::partition();
  c.num_classical_bits = 2;
  c.add(Gate::prepare({L::ancilla_a, L::ancilla_b}, resource));
  c.add(virtual_teleport_block_a(L::data_a, L::ancilla_a, L::bit_k));
  c.add(virtual_teleport_block_b(L::data_b, L::ancilla_b, L::bit_l));
  return c;
}

struct FragmentPair {
  Circuit a;
  Circuit b;
};

/// Independent A and B pieces of virtual teleportation for product ancilla
/// preparations. Each piece has qubit 0 = data, qubit 1 = ancilla; A writes
/// classical bit 0 (k), B writes bit 1 (l).
inline FragmentPair build_virtual_teleportation_fragmentpair(const Statevector& ancilla_prep_a,
                                                             const Statevector& ancilla_prep_b) {
  if (ancilla_prep_a.dimension() != 2 || ancilla_prep_b.dimension() != 2) {
    throw std::invalid_argument("virtual teleportation: ancilla preparations must be single-qubit states");
  }
  FragmentPair fp;
  for (Circuit* c : {&fp.a, &fp.b}) {
    c->num_qubits = 2;
    c->num_classical_bits = 2;
  }
  fp.a.partition = {Partition::A, Partition::A};
  fp.b.partition = {Partition::B, Partition::B};
  fp.a.add(Gate::prepare({1}, ancilla_prep_a)).add(virtual_teleport_block_a(0, 1, TeleportLayout::bit_k));
  fp.b.add(Gate::prepare({1}, ancilla_prep_b)).add(virtual_teleport_block_b(0, 1, TeleportLayout::bit_l));
  return fp;
}

}  // namespace qcut
