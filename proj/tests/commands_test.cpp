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

#include <gtest/gtest.h>

#include <cmath>

#include "qcut/commands.hpp"

namespace {

using namespace qcut;
constexpr double kHalfPi = 1.5707963267948966;

Circuit load_sample(const std::string& name) { return load_circuit(std::string(QCUT_SAMPLES_DIR) + "/" + name); }

Circuit parallel_pair(double t0, double t1) {
  Circuit c;
  c.num_qubits = 4;
  c.partition = {Partition::A, Partition::A, Partition::B, Partition::B};
  c.add(Gate::h(0)).add(Gate::h(1)).add(Gate::rzz(0, 2, t0)).add(Gate::rzz(1, 3, t1));
  return c;
}

TEST(GammaCommand, CnotAngleTable) {
  GammaConfig cfg;
  cfg.n_min = 1;
  cfg.n_max = 4;
  const auto rows = cmd_gamma(cfg);
  ASSERT_EQ(rows.size(), 4u);
  const double expect[] = {3, 7, 15, 31};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(rows[k]["n"], k + 1);
    EXPECT_NEAR(rows[k]["gamma_joint"].get<double>(), expect[k], 1e-12);
    EXPECT_NEAR(rows[k]["gamma_lower"].get<double>(), expect[k], 1e-12);
    EXPECT_NEAR(rows[k]["gamma_independent"].get<double>(), std::pow(3.0, k + 1), 1e-12);
  }
}

TEST(GammaCommand, ZeroAngleAndTuple) {
  GammaConfig cfg;
  cfg.n_min = cfg.n_max = 2;
  cfg.thetas = {0.0, kHalfPi / 2};
  const auto rows = cmd_gamma(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0]["gamma_joint"].get<double>(), 1.0);
  EXPECT_NEAR(rows[1]["gamma_joint"].get<double>(), 4.828427124746190, 1e-12);
  cfg.tuple = std::vector<double>{0.3, 1.1, 2.0};
  const auto one = cmd_gamma(cfg);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0]["gamma_lower"].get<double>(), one[0]["gamma_joint"].get<double>(), 1e-12);
  // Beyond 4 gates the diagonal route is used.
  cfg.tuple = std::vector<double>(6, 0.7);
  const auto six = cmd_gamma(cfg);
  EXPECT_NEAR(six[0]["gamma_lower"].get<double>(), six[0]["gamma_joint"].get<double>(), 1e-10);
}

TEST(GammaCommand, BadConfig) {
  GammaConfig cfg;
  cfg.n_min = 3;
  cfg.n_max = 2;
  EXPECT_THROW(cmd_gamma(cfg), std::invalid_argument);
  cfg.tuple = std::vector<double>(13, 0.1);
  EXPECT_THROW(cmd_gamma(cfg), std::invalid_argument);
}

TEST(AngleGrid, Parsing) {
  EXPECT_EQ(parse_angle_grid("0:1:3"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_angle_grid("0.25"), (std::vector<double>{0.25}));
  EXPECT_EQ(parse_angle_grid("1,2,-3"), (std::vector<double>{1, 2, -3}));
  EXPECT_THROW(parse_angle_grid("0:1"), std::invalid_argument);
  EXPECT_THROW(parse_angle_grid("0:1:0"), std::invalid_argument);
  EXPECT_THROW(parse_angle_grid("x"), std::invalid_argument);
}

TEST(VerifyCommand, SingleCnotAngle) {
  Circuit c;
  c.num_qubits = 2;
  c.partition = {Partition::A, Partition::B};
  c.add(Gate::rzz(0, 1, kHalfPi));
  const auto j = cmd_verify(c, CutScheme::ParallelAncillaFree, 4);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_NEAR(j["gamma"].get<double>(), 3.0, 1e-12);
  EXPECT_EQ(j["terms"], 6);
  EXPECT_EQ(j["ancillas_per_partition"], 0);
  const auto jt = cmd_verify(c, CutScheme::JointTeleport, 3);
  EXPECT_TRUE(jt["pass"].get<bool>());
  EXPECT_EQ(jt["terms"], 2 + 3 * 2);
}

TEST(VerifyCommand, TwoParallelGates) {
  for (auto s : {CutScheme::ParallelAncillaFree, CutScheme::JointTeleport}) {
    const auto j = cmd_verify(parallel_pair(kHalfPi, kHalfPi), s, 4);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_TRUE(j["parallel"].get<bool>());
    EXPECT_NEAR(j["gamma"].get<double>(), 7.0, 1e-12);
  }
  const auto ind = cmd_verify(parallel_pair(kHalfPi, kHalfPi), CutScheme::Independent, 4);
  EXPECT_NEAR(ind["gamma"].get<double>(), 9.0, 1e-12);
}

TEST(VerifyCommand, ZeroAngleOneTerm) {
  const auto j = cmd_verify(parallel_pair(0.0, 0.0), CutScheme::JointTeleport, 4);
  EXPECT_EQ(j["terms"], 1);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(VerifyCommand, QubitLimit) {
  EXPECT_THROW(cmd_verify(load_sample("ring6_joint.json"), CutScheme::JointTeleport, 4, 6), std::length_error);
  EXPECT_THROW(cmd_verify(parallel_pair(1, 1), CutScheme::JointTeleport, 2), std::invalid_argument);
}

TEST(VerifyCommand, NonParallelRejectedForAncillaFree) {
  EXPECT_THROW(cmd_verify(load_sample("ring6_joint.json"), CutScheme::ParallelAncillaFree, 4), std::invalid_argument);
}

TEST(EstimateCommand, ByteIdenticalReruns) {
  const auto c = load_sample("ring6_joint.json");
  EstimateConfig cfg;
  cfg.observable = "zz 0 3";
  cfg.shots = 3000;
  cfg.seed = 17;
  const auto a = render(cmd_estimate(c, cfg), "json");
  cfg.workers = 3;
  const auto b = render(cmd_estimate(c, cfg), "json");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("elapsed_seconds"), std::string::npos);
  cfg.timing = true;
  EXPECT_TRUE(cmd_estimate(c, cfg).contains("elapsed_seconds"));
}

TEST(EstimateCommand, ReportsExactAndZScore) {
  EstimateConfig cfg;
  cfg.observable = "parity";
  cfg.shots = 20000;
  cfg.scheme = CutScheme::ParallelAncillaFree;
  const auto j = cmd_estimate(load_sample("parallel_cnot_pair.json"), cfg);
  ASSERT_TRUE(j.contains("exact"));
  EXPECT_LT(j["z_score"].get<double>(), 5.0);
  std::size_t total = 0;
  for (const auto& t : j["per_term"]) total += t["count"].get<std::size_t>();
  EXPECT_EQ(total, 20000u);
}

TEST(LowerboundCommand, Builtins) {
  const auto t = cmd_lowerbound_builtin("toffoli");
  EXPECT_NEAR(t["gamma_lower"].get<double>(), 1.0 + std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(cmd_lowerbound_builtin("cnot")["gamma_lower"].get<double>(), 3.0, 1e-12);
  EXPECT_THROW(cmd_lowerbound_builtin("swap"), std::invalid_argument);
}

TEST(LowerboundCommand, CircuitWithInterleavedPartition) {
  Circuit c;
  c.num_qubits = 4;
  c.partition = {Partition::B, Partition::A, Partition::B, Partition::A};
  c.add(Gate::rzz(1, 0, 0.9)).add(Gate::rzz(3, 2, kHalfPi)).add(Gate::h(0));
  const auto j = cmd_lowerbound(c);
  EXPECT_EQ(j["qubits_a"], 2);
  const double th[] = {0.9, kHalfPi};
  EXPECT_NEAR(j["gamma_lower"].get<double>(), gamma_joint(th), 1e-12);
}

TEST(CircuitJson, RoundTrip) {
  Circuit c;
  c.num_qubits = 3;
  c.partition = {Partition::A, Partition::B, Partition::B};
  c.num_classical_bits = 1;
  c.sign_bits = {0};
  c.add(Gate::h(0)).add(Gate::multi_rz({0, 1, 2}, 0.125)).add(Gate::prepare({1, 2}, {Complex{0.6, 0}, 0, 0, Complex{0, 0.8}}));
  c.add(Gate::measure(1, 0)).add(Gate::conditioned(Pauli::Z, 2, 0)).add(Gate::cnot(2, 1));
  const auto back = circuit_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(back, c);
}

TEST(CircuitJson, Errors) {
  using nlohmann::json;
  EXPECT_THROW(circuit_from_json(json::parse(R"({"num_qubits":1,"gates":[{"kind":"foo","qubits":[0]}]})")),
               std::invalid_argument);
  EXPECT_THROW(circuit_from_json(json::parse(R"({"num_qubits":1,"gates":[{"kind":"rz","qubits":[0]}]})")),
               std::invalid_argument);
  EXPECT_THROW(circuit_from_json(json::parse(R"({"num_qubits":1,"gates":[{"kind":"h","qubits":[3]}]})")),
               std::invalid_argument);
  EXPECT_THROW(load_circuit("/nonexistent/circuit.json"), std::runtime_error);
}

TEST(Observables, Parsing) {
  const auto p = Observable::parse("parity", 3);
  EXPECT_EQ(p(0b000), 1.0);
  EXPECT_EQ(p(0b011), 1.0);
  EXPECT_EQ(p(0b111), -1.0);
  const auto z = Observable::parse("z 0", 3);
  EXPECT_EQ(z(0b100), -1.0);
  EXPECT_EQ(z(0b011), 1.0);
  const auto w = Observable::parse("0.5 z0 z1 + -0.25 z2", 3);
  EXPECT_DOUBLE_EQ(w(0b001), 0.75);
  EXPECT_DOUBLE_EQ(w(0b100), -0.75);
  EXPECT_DOUBLE_EQ(w(0b000), 0.25);
  EXPECT_THROW(Observable::parse("z 3", 3), std::invalid_argument);
  EXPECT_THROW(Observable::parse("zz 1 1", 3), std::invalid_argument);
  EXPECT_THROW(Observable::parse("0.8 z0 + 0.8 z1", 3), std::invalid_argument);
  EXPECT_THROW(Observable::parse("0.5 x0", 3), std::invalid_argument);
}

TEST(Rendering, CsvAndJson) {
  GammaConfig cfg;
  cfg.n_min = 1;
  cfg.n_max = 2;
  const auto csv = render(cmd_gamma(cfg), "csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "gamma_independent,gamma_joint,gamma_lower,n,ratio,theta,thetas");
  EXPECT_NE(csv.find("\n9,7,7,2,0.77777777777777779,1.5707963267948966,1.5707963267948966;1.5707963267948966\n"),
            std::string::npos)
      << csv;
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_THROW(render(nlohmann::json::object(), "xml"), std::invalid_argument);
  const auto j = render({{"a", 1}}, "json");
  EXPECT_EQ(j.back(), '\n');
}

TEST(Environment, MaxQubits) {
  ::setenv("QCUT_MAX_QUBITS", "5", 1);
  EXPECT_EQ(max_qubits_from_env(), 5u);
  ::setenv("QCUT_MAX_QUBITS", "junk", 1);
  EXPECT_EQ(max_qubits_from_env(), kDefaultMaxQubits);
  ::unsetenv("QCUT_MAX_QUBITS");
  EXPECT_EQ(max_qubits_from_env(), kDefaultMaxQubits);
}

}  // namespace
