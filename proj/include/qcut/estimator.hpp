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

// Monte-Carlo evaluation of expectation values through a CutDecomposition.
//
// Shot t draws its term from stream hash(seed, t, plan); its A fragment runs
// on hash(seed, t, A) and its B fragment on hash(seed, t, B). Nothing else is
// shared, so results do not depend on execution order or worker count.
//
// Each shot contributes  kappa * sign(w) * (-1)^{parity of sign bits} * f(s),
// where s is the data-qubit bitstring of the base circuit (big-endian basis
// index): A and B outcomes are scattered back to their original positions.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qcut/circuit.hpp"
#include "qcut/cutting.hpp"
#include "qcut/rng.hpp"

namespace qcut {

namespace stream {
inline constexpr std::uint64_t kPlan = 0x504c414e;
inline constexpr std::uint64_t kFragmentA = 0x46524741;
inline constexpr std::uint64_t kFragmentB = 0x46524742;
inline constexpr std::uint64_t kUncut = 0x554e4354;
inline constexpr std::uint64_t kTrial = 0x5452494c;
}  // namespace stream

struct ShotPlan {
  std::vector<std::size_t> counts;         ///< per term
  std::vector<std::uint32_t> assignment;   ///< term of each shot
  std::vector<double> probabilities;       ///< |w_i| / kappa
  std::size_t total = 0;
  std::uint64_t seed = 0;
};

inline ShotPlan plan_shots(const CutDecomposition& d, std::size_t n_shots, std::uint64_t seed) {
  if (d.terms.empty()) throw std::invalid_argument("plan_shots: empty decomposition");
  if (n_shots == 0) throw std::invalid_argument("plan_shots: need at least one shot");
  ShotPlan p;
  p.total = n_shots;
  p.seed = seed;
  const double kappa = d.kappa();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& t : d.terms) {
    p.probabilities.push_back(std::abs(t.weight) / kappa);
    acc += std::abs(t.weight) / kappa;
    cumulative.push_back(acc);
  }
  p.counts.assign(d.terms.size(), 0);
  p.assignment.resize(n_shots);
  for (std::size_t t = 0; t < n_shots; ++t) {
    CounterRng rng(derive_seed(seed, {t, stream::kPlan}));
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    const auto term = static_cast<std::uint32_t>(it - cumulative.begin());
    p.assignment[t] = term;
    ++p.counts[term];
  }
  return p;
}

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  double kappa = 1.0;
  std::size_t shots = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> per_term_counts;
  std::vector<double> per_term_sums;  ///< sum of signed, kappa-scaled values per term
  double elapsed_seconds = 0.0;

  double variance_per_shot() const { return std_error * std_error * static_cast<double>(shots); }
};

enum class ExecutionOrder { Interleaved, AllAThenB };

struct EstimatorOptions {
  unsigned workers = 1;
  ExecutionOrder order = ExecutionOrder::Interleaved;
  /// Turning this off ignores ancilla/instrument outcome signs (negative control).
  bool apply_outcome_signs = true;
};

namespace detail {

/// A fragment with its deterministic prefix (everything before the first
/// measurement) pre-simulated.
struct PreparedFragment {
  Fragment fragment;
  std::vector<Complex> prefix;
  std::size_t resume = 0;
};

inline PreparedFragment prepare_fragment(Fragment f) {
  validate(f.circuit);
  PreparedFragment p;
  const std::size_t n = f.circuit.num_qubits;
  p.prefix.assign(std::size_t{1} << n, Complex{});
  p.prefix[0] = 1.0;
  const auto& gates = f.circuit.gates;
  while (p.resume < gates.size() && gates[p.resume].kind != GateKind::MeasureZ &&
         gates[p.resume].kind != GateKind::ConditionedPauli)
    ++p.resume;
  ShotRecord rec;
  rec.bits.assign(f.circuit.num_classical_bits, -1);
  CounterRng unused(0);
  run_gates(p.prefix, n, std::span(gates).first(p.resume), rec, unused);
  p.fragment = std::move(f);
  return p;
}

struct FragmentOutcome {
  std::uint64_t data_bits = 0;  ///< side's data qubits, ascending global order
  int sign = 1;
};

inline FragmentOutcome run_fragment(const PreparedFragment& p, std::uint64_t seed) {
  const Circuit& c = p.fragment.circuit;
  std::vector<Complex> v = p.prefix;
  ShotRecord rec;
  rec.bits.assign(c.num_classical_bits, -1);
  CounterRng rng(seed);
  run_gates(v, c.num_qubits, std::span(c.gates).subspan(p.resume), rec, rng);
  const std::size_t idx = sample_basis_state(v, rng.uniform());
  FragmentOutcome out;
  for (auto k : p.fragment.data_local) out.data_bits = (out.data_bits << 1) | ((idx >> (c.num_qubits - 1 - k)) & 1U);
  out.sign = sign_of(rec, c.sign_bits);
  return out;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::max(1U, workers);
  if (workers == 1 || count < 2 * workers) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::vector<double> tabulate(const BitstringFunction& f, std::size_t num_qubits) {
  if (num_qubits > 24) throw std::length_error("estimator: too many data qubits to tabulate f");
  std::vector<double> table(std::size_t{1} << num_qubits);
  for (std::size_t s = 0; s < table.size(); ++s) {
    table[s] = f(s);
    if (!(table[s] >= -1.0 && table[s] <= 1.0)) throw std::domain_error("estimator: f(s) outside [-1, 1]");
  }
  return table;
}

inline void finish(Estimate& e, const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  const double n = static_cast<double>(values.size());
  e.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace detail

/// Sign-weighted quasi-probability estimate of sum_s p(s) f(s) for the
/// circuit that `d` decomposes.
inline Estimate estimate_expectation(const Circuit& circuit, const CutDecomposition& d, const BitstringFunction& f,
                                     std::size_t n_shots, std::uint64_t seed, const EstimatorOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(circuit == d.base)) throw std::invalid_argument("estimate_expectation: decomposition targets a different circuit");
  const std::size_t N = d.data_qubits();
  const auto table = detail::tabulate(f, N);
  const ShotPlan plan = plan_shots(d, n_shots, seed);
  const double kappa = d.kappa();

  // Prepared fragments for every term that is actually sampled.
  std::vector<detail::PreparedFragment> frag_a(d.terms.size()), frag_b(d.terms.size());
  for (std::size_t t = 0; t < d.terms.size(); ++t) {
    if (plan.counts[t] == 0) continue;
    frag_a[t] = detail::prepare_fragment(build_fragment(d, t, Partition::A));
    frag_b[t] = detail::prepare_fragment(build_fragment(d, t, Partition::B));
  }

  // Scatter side-local data bits back to base-circuit positions.
  std::vector<std::size_t> qa, qb;
  for (std::size_t q = 0; q < N; ++q) (d.partition[q] == Partition::A ? qa : qb).push_back(q);
  auto scatter = [N](const std::vector<std::size_t>& qs, std::uint64_t bits) {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < qs.size(); ++k)
      if ((bits >> (qs.size() - 1 - k)) & 1U) s |= std::uint64_t{1} << (N - 1 - qs[k]);
    return s;
  };

  std::vector<detail::FragmentOutcome> out_a(n_shots), out_b(n_shots);
  auto run_a = [&](std::size_t i) {
    out_a[i] = detail::run_fragment(frag_a[plan.assignment[i]], derive_seed(seed, {i, stream::kFragmentA}));
  };
  auto run_b = [&](std::size_t i) {
    out_b[i] = detail::run_fragment(frag_b[plan.assignment[i]], derive_seed(seed, {i, stream::kFragmentB}));
  };
  if (opt.order == ExecutionOrder::AllAThenB) {
    detail::parallel_for(n_shots, opt.workers, run_a);
    detail::parallel_for(n_shots, opt.workers, run_b);
  } else {
    detail::parallel_for(n_shots, opt.workers, [&](std::size_t i) {
      run_a(i);
      run_b(i);
    });
  }

  Estimate e;
  e.kappa = kappa;
  e.shots = n_shots;
  e.seed = seed;
  e.per_term_counts = plan.counts;
  e.per_term_sums.assign(d.terms.size(), 0.0);
  std::vector<double> values(n_shots);
  for (std::size_t i = 0; i < n_shots; ++i) {
    const auto term = plan.assignment[i];
    const std::uint64_t s = scatter(qa, out_a[i].data_bits) | scatter(qb, out_b[i].data_bits);
    double v = kappa * (d.terms[term].weight < 0 ? -1.0 : 1.0) * table[s];
    if (opt.apply_outcome_signs) v *= out_a[i].sign * out_b[i].sign;
    values[i] = v;
    e.per_term_sums[term] += v;
  }
  detail::finish(e, values);
  e.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return e;
}

/// Plain shot sampling of the uncut circuit with the same f.
inline Estimate estimate_uncut(const Circuit& circuit, const BitstringFunction& f, std::size_t n_shots,
                               std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (n_shots == 0) throw std::invalid_argument("estimate_uncut: need at least one shot");
  if (circuit.has_measurements()) throw std::invalid_argument("estimate_uncut: circuit must be measurement-free");
  const auto table = detail::tabulate(f, circuit.num_qubits);
  const auto state = simulate_statevector(circuit, 0).state;
  std::vector<double> values(n_shots);
  for (std::size_t i = 0; i < n_shots; ++i) {
    CounterRng rng(derive_seed(seed, {i, stream::kUncut}));
    values[i] = table[sample_basis_state(state.amplitudes(), rng.uniform())];
  }
  Estimate e;
  e.shots = n_shots;
  e.seed = seed;
  detail::finish(e, values);
  e.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return e;
}

struct OverheadResult {
  double ratio = 0.0;
  double ratio_uncertainty = 0.0;  ///< one standard deviation
  double variance_cut = 0.0;       ///< variance of trial means, cut estimator
  double variance_uncut = 0.0;
  std::size_t trials = 0;
};

/// Ratio of trial-mean variances, cut over uncut. The uncertainty uses
/// Var(sample variance) ~ 2 sigma^4 / (T - 1) for each factor.
inline OverheadResult empirical_overhead(const Circuit& circuit, const CutDecomposition& d, const BitstringFunction& f,
                                         std::size_t n_trials, std::size_t shots_per_trial, std::uint64_t seed,
                                         const EstimatorOptions& opt = {}) {
  if (n_trials < 2) throw std::invalid_argument("empirical_overhead: need at least two trials");
  std::vector<double> cut(n_trials), uncut(n_trials);
  for (std::size_t t = 0; t < n_trials; ++t) {
    cut[t] = estimate_expectation(circuit, d, f, shots_per_trial, derive_seed(seed, {t, stream::kTrial, 1}), opt).mean;
    uncut[t] = estimate_uncut(circuit, f, shots_per_trial, derive_seed(seed, {t, stream::kTrial, 2})).mean;
  }
  auto var = [](const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
  };
  OverheadResult r;
  r.trials = n_trials;
  r.variance_cut = var(cut);
  r.variance_uncut = var(uncut);
  if (r.variance_uncut <= 0.0) throw std::domain_error("empirical_overhead: uncut estimator has zero variance");
  r.ratio = r.variance_cut / r.variance_uncut;
  r.ratio_uncertainty = r.ratio * std::sqrt(4.0 / static_cast<double>(n_trials - 1));
  return r;
}

}  // namespace qcut
