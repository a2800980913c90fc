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

// The operations behind the qcut command line, returning JSON documents.
// Rendering (JSON text or CSV) lives here too so tests can check the exact
// bytes a command would print.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcut/circuit.hpp"
#include "qcut/circuit_json.hpp"
#include "qcut/cutting.hpp"
#include "qcut/estimator.hpp"
#include "qcut/observable.hpp"

namespace qcut {

inline constexpr std::size_t kDefaultMaxQubits = 12;
inline constexpr double kVerifyTolerance = 1e-9;

/// QCUT_MAX_QUBITS, or 12 when unset or unparsable.
inline std::size_t max_qubits_from_env() {
  const char* v = std::getenv("QCUT_MAX_QUBITS");
  if (v == nullptr || *v == '\0') return kDefaultMaxQubits;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (end == v || *end != '\0' || n == 0) return kDefaultMaxQubits;
  return n;
}

inline CutScheme parse_scheme(const std::string& s) {
  if (s == "independent") return CutScheme::Independent;
  if (s == "joint" || s == "joint_teleport") return CutScheme::JointTeleport;
  if (s == "parallel" || s == "parallel_ancilla_free") return CutScheme::ParallelAncillaFree;
  throw std::invalid_argument("unknown scheme '" + s + "' (expected independent, joint or parallel)");
}

/// Reduces cross-partition multi-qubit rotations, groups every cut RZZ and
/// decomposes them with the requested scheme.
inline CutDecomposition decompose_circuit(const Circuit& c, CutScheme scheme, int alpha) {
  if (alpha < 3) throw std::invalid_argument("alpha must be at least 3");
  if (c.partition.empty()) throw std::invalid_argument("circuit has no partition");
  const Circuit reduced = reduce_cut_rotations(c);
  const GateGroup g = make_gate_group(reduced, find_cut_gates(reduced));
  switch (scheme) {
    case CutScheme::Independent: return cut_independent(reduced, g);
    case CutScheme::JointTeleport: return cut_joint_teleport(reduced, g, alpha);
    case CutScheme::ParallelAncillaFree: return cut_parallel_ancilla_free(reduced, g);
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// gamma

struct GammaConfig {
  std::size_t n_min = 1;
  std::size_t n_max = 4;
  std::vector<double> thetas{kPi / 2};  ///< each value is applied to all n gates
  /// When set, a single row for exactly these per-gate angles.
  std::optional<std::vector<double>> tuple;
};

inline double gamma_lower_layer(std::span<const double> thetas) {
  const std::size_t n = thetas.size();
  const std::size_t dim = std::size_t{1} << n;
  if (n <= 4) return lower_bound_gamma(rzz_layer_unitary(thetas), dim, dim);
  return lower_bound_gamma_diagonal(rzz_layer_diagonal(thetas), dim, dim);
}

inline nlohmann::json cmd_gamma(const GammaConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  auto row = [&](const std::vector<double>& th) {
    if (th.size() > 12) throw std::invalid_argument("gamma: at most 12 gates");
    const double gi = gamma_independent(th), gj = gamma_joint(th);
    rows.push_back({{"n", th.size()},
                    {"theta", th.empty() ? 0.0 : th.front()},
                    {"thetas", th},
                    {"gamma_independent", gi},
                    {"gamma_joint", gj},
                    {"gamma_lower", gamma_lower_layer(th)},
                    {"ratio", gj / gi}});
  };
  if (cfg.tuple) {
    row(*cfg.tuple);
  } else {
    if (cfg.n_min < 1 || cfg.n_max < cfg.n_min) throw std::invalid_argument("gamma: need 1 <= n-min <= n-max");
    if (cfg.thetas.empty()) throw std::invalid_argument("gamma: empty angle grid");
    for (std::size_t n = cfg.n_min; n <= cfg.n_max; ++n)
      for (double t : cfg.thetas) row(std::vector<double>(n, t));
  }
  return rows;
}

/// "start:stop:count" (inclusive, evenly spaced) or a comma list.
inline std::vector<double> parse_angle_grid(const std::string& spec) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("malformed angle '" + s + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("angle grid must be start:stop:count");
    const double a = num(parts[0]), b = num(parts[1]);
    const double cnt = num(parts[2]);
    if (cnt < 1 || cnt != std::floor(cnt)) throw std::invalid_argument("angle grid count must be a positive integer");
    const auto count = static_cast<std::size_t>(cnt);
    for (std::size_t k = 0; k < count; ++k) out.push_back(count == 1 ? a : a + (b - a) * k / (count - 1));
    return out;
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(num(p));
  if (out.empty()) throw std::invalid_argument("empty angle list");
  return out;
}

// ---------------------------------------------------------------------------
// verify

inline nlohmann::json cmd_verify(const Circuit& c, CutScheme scheme, int alpha,
                                 std::size_t max_qubits = max_qubits_from_env()) {
  const CutDecomposition d = decompose_circuit(c, scheme, alpha);
  if (d.total_qubits() > max_qubits) {
    throw std::length_error("verify: " + std::to_string(d.total_qubits()) + " qubits exceed the simulator limit of " +
                            std::to_string(max_qubits));
  }
  ReconstructOptions ro;
  ro.max_data_qubits = std::min<std::size_t>(6, max_qubits);
  const SuperOperator s = reconstruct_channel(d, ro);
  const double err = frobenius_distance_to_unitary(s, circuit_unitary(d.base));
  bool comm_free = true;
  for (std::size_t t = 0; t < d.terms.size(); ++t) comm_free = comm_free && term_is_communication_free(d, t);
  return {{"scheme", to_string(d.scheme)},
          {"alpha", alpha},
          {"cut_gates", d.group.size()},
          {"parallel", d.group.parallel},
          {"gamma", d.gamma},
          {"kappa", d.kappa()},
          {"terms", d.terms.size()},
          {"data_qubits", d.data_qubits()},
          {"ancillas_per_partition", d.ancillas_per_partition},
          {"reconstruction_error", err},
          {"tolerance", kVerifyTolerance},
          {"communication_free", comm_free},
          {"pass", err <= kVerifyTolerance && comm_free}};
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateConfig {
  std::string observable = "parity";
  CutScheme scheme = CutScheme::JointTeleport;
  int alpha = 4;
  std::size_t shots = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  bool timing = false;
  std::size_t max_qubits = kDefaultMaxQubits;
};

inline nlohmann::json cmd_estimate(const Circuit& c, const EstimateConfig& cfg) {
  if (cfg.shots < 1) throw std::invalid_argument("estimate: shots must be at least 1");
  const CutDecomposition d = decompose_circuit(c, cfg.scheme, cfg.alpha);
  std::size_t widest = 0;
  for (auto side : {Partition::A, Partition::B}) {
    std::size_t k = 0;
    for (auto p : d.partition) k += p == side;
    widest = std::max(widest, k);
  }
  if (widest > cfg.max_qubits) throw std::length_error("estimate: fragment exceeds the simulator limit");
  const Observable obs = Observable::parse(cfg.observable, c.num_qubits);
  EstimatorOptions eo;
  eo.workers = cfg.workers;
  const Estimate e = estimate_expectation(d.base, d, obs.function(), cfg.shots, cfg.seed, eo);
  nlohmann::json j = {{"scheme", to_string(d.scheme)},
                      {"observable", obs.description()},
                      {"gamma", d.gamma},
                      {"kappa", e.kappa},
                      {"terms", d.terms.size()},
                      {"shots", e.shots},
                      {"seed", e.seed},
                      {"mean", e.mean},
                      {"stderr", e.std_error}};
  if (c.num_qubits <= cfg.max_qubits) {
    const double exact = exact_expectation(d.base, obs.function());
    j["exact"] = exact;
    j["z_score"] = e.std_error > 0 ? std::abs(e.mean - exact) / e.std_error : (e.mean == exact ? 0.0 : 1e300);
  }
  nlohmann::json tallies = nlohmann::json::array();
  for (std::size_t t = 0; t < d.terms.size(); ++t) {
    tallies.push_back({{"label", d.terms[t].label}, {"weight", d.terms[t].weight}, {"count", e.per_term_counts[t]}});
  }
  j["per_term"] = tallies;
  if (cfg.timing) j["elapsed_seconds"] = e.elapsed_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// lowerbound

inline Matrix toffoli_matrix() {
  Matrix m = Matrix::identity(8);
  m(6, 6) = 0.0;
  m(7, 7) = 0.0;
  m(6, 7) = 1.0;
  m(7, 6) = 1.0;
  return m;
}

/// Choi-state lower bound of a measurement-free circuit across its partition.
inline nlohmann::json cmd_lowerbound(const Circuit& c) {
  if (c.partition.empty()) throw std::invalid_argument("lowerbound: circuit has no partition");
  if (c.num_qubits > 6) throw std::length_error("lowerbound: at most 6 qubits");
  // Relabel so that the A qubits come first.
  std::vector<std::size_t> to_new(c.num_qubits);
  std::size_t na = 0;
  for (std::size_t q = 0; q < c.num_qubits; ++q)
    if (c.partition[q] == Partition::A) to_new[q] = na++;
  std::size_t nb = 0;
  for (std::size_t q = 0; q < c.num_qubits; ++q)
    if (c.partition[q] == Partition::B) to_new[q] = na + nb++;
  if (na == 0 || nb == 0) throw std::invalid_argument("lowerbound: both partitions must be non-empty");
  Circuit r = c;
  for (auto& g : r.gates)
    for (auto& q : g.qubits) q = to_new[q];
  const Matrix u = circuit_unitary(r);
  const std::size_t da = std::size_t{1} << na, db = std::size_t{1} << nb;
  return {{"qubits_a", na},
          {"qubits_b", nb},
          {"schmidt_coefficients", choi_schmidt_coefficients(u, da, db)},
          {"gamma_lower", lower_bound_gamma(u, da, db)}};
}

inline nlohmann::json cmd_lowerbound_builtin(const std::string& name) {
  if (name == "toffoli") {
    const Matrix u = toffoli_matrix();
    return {{"gate", name},
            {"qubits_a", 1},
            {"qubits_b", 2},
            {"schmidt_coefficients", choi_schmidt_coefficients(u, 2, 4)},
            {"gamma_lower", lower_bound_gamma(u, 2, 4)}};
  }
  if (name == "cnot") {
    const Matrix u = mat::cnot();
    return {{"gate", name},
            {"qubits_a", 1},
            {"qubits_b", 1},
            {"schmidt_coefficients", choi_schmidt_coefficients(u, 2, 2)},
            {"gamma_lower", lower_bound_gamma(u, 2, 2)}};
  }
  throw std::invalid_argument("lowerbound: unknown builtin '" + name + "' (expected toffoli or cnot)");
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string csv_cell(const nlohmann::json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + csv_cell(v[i]);
    return s;
  }
  return v.dump();
}

}  // namespace detail

/// Array of flat objects -> header + rows; a single object -> header + one
/// row of its scalar and list fields (nested objects are skipped).
inline std::string render_csv(const nlohmann::json& j) {
  const nlohmann::json rows = j.is_array() ? j : nlohmann::json::array({j});
  if (rows.empty()) return "";
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows.front().items()) {
    if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_object())) continue;
    keys.push_back(k);
  }
  std::string out;
  for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
  out += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + (r.contains(keys[i]) ? detail::csv_cell(r.at(keys[i])) : "");
    out += "\n";
  }
  return out;
}

inline std::string render(const nlohmann::json& j, const std::string& format) {
  if (format == "json") return j.dump(2) + "\n";
  if (format == "csv") return render_csv(j);
  throw std::invalid_argument("unknown format '" + format + "' (expected json or csv)");
}

}  // namespace qcut
