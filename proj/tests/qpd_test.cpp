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
#include <random>
#include <set>

#include "oracle.hpp"
#include "qcut/qpd.hpp"

namespace {

using namespace qcut;

DensityMatrix projector(const Statevector& s) { return DensityMatrix::from_pure(s); }

Statevector resource(double th) { return Statevector::from_amplitudes({std::cos(th / 2), 0.0, 0.0, std::sin(th / 2)}); }

TEST(Robustness, Examples) {
  const double one[] = {1.0};
  EXPECT_DOUBLE_EQ(robustness(one), 0.0);
  const double h = 1.0 / std::sqrt(2.0);
  const double bell[] = {h, h};
  EXPECT_NEAR(robustness(bell), 1.0, 1e-15);
  const double c8[] = {std::cos(qcut::kPi / 8), std::sin(qcut::kPi / 8)};
  EXPECT_NEAR(robustness(c8), std::sqrt(2.0) / 2, 1e-15);
  const double bad[] = {1.0, 1.0};
  EXPECT_THROW(robustness(bad), std::invalid_argument);
}

TEST(GammaFromSchmidt, Examples) {
  const double h = 1.0 / std::sqrt(2.0);
  const double bell[] = {h, h};
  EXPECT_NEAR(gamma_from_schmidt(bell), 3.0, 1e-15);
  const double one[] = {1.0};
  EXPECT_DOUBLE_EQ(gamma_from_schmidt(one), 1.0);
  const double c[] = {std::cos(qcut::kPi / 8), std::sin(qcut::kPi / 8)};
  EXPECT_NEAR(gamma_from_schmidt(c), 1 + std::sqrt(2.0), 1e-12);
}

TEST(PhaseSet, ValuesAndVanishingSums) {
  const auto p3 = phase_set(3);
  ASSERT_EQ(p3.size(), 3u);
  EXPECT_NEAR(p3[0], 2 * qcut::kPi / 3, 1e-15);
  EXPECT_NEAR(p3[2], 2 * qcut::kPi, 1e-15);
  const auto p4 = phase_set(4);
  EXPECT_NEAR(p4[0], qcut::kPi / 2, 1e-15);
  EXPECT_NEAR(p4[1], qcut::kPi, 1e-15);
  EXPECT_NEAR(p4[2], 3 * qcut::kPi / 2, 1e-15);
  for (int alpha = 3; alpha <= 9; ++alpha) {
    Complex s1 = 0.0, s2 = 0.0;
    for (double p : phase_set(alpha)) {
      s1 += std::polar(1.0, p);
      s2 += std::polar(1.0, 2 * p);
    }
    EXPECT_LE(std::abs(s1), 1e-12);
    EXPECT_LE(std::abs(s2), 1e-12);
  }
  EXPECT_THROW(phase_set(2), std::invalid_argument);
}

TEST(PureStateQpd, ProductStateIsOneTerm) {
  const auto q = pure_state_qpd(Statevector::basis(8, 5), 2, 4);
  ASSERT_EQ(q.terms.size(), 1u);
  EXPECT_NEAR(q.gamma, 1.0, 1e-15);
  EXPECT_NEAR(q.kappa, 1.0, 1e-15);
  EXPECT_LT(verify_qpd(q, projector(Statevector::basis(8, 5))), 1e-12);
}

TEST(PureStateQpd, TeleportationResourceAlphaThree) {
  for (double th : {0.2, 0.9, 1.5707963267948966, 2.4}) {
    const auto q = pure_state_qpd(resource(th), 2, 2, 3);
    EXPECT_NEAR(q.gamma, 1 + 2 * std::abs(std::sin(th)), 1e-12);
    EXPECT_NEAR(q.kappa, q.gamma, 1e-12);
    EXPECT_EQ(q.terms.size(), 2u + 3u * 2u);
    EXPECT_LT(verify_qpd(q, projector(resource(th))), 1e-10);
  }
}

// Cross-term states depend on the basis, never on the coefficients.
TEST(PureStateQpd, CrossStatesIndependentOfAngle) {
  const std::vector<Statevector> basis = {Statevector::basis(2, 0), Statevector::basis(2, 1)};
  auto states = [&](double th) {
    const double c[] = {std::cos(th / 2), std::sin(th / 2)};
    const auto q = qpd_from_expansion(c, basis, basis, 4);
    std::vector<std::pair<Statevector, Statevector>> out;
    for (const auto& t : q.terms) out.emplace_back(t.state_a, t.state_b);
    return out;
  };
  const auto ref = states(0.3);
  for (double th : {0.7, 1.9, 2.8, -1.0}) EXPECT_EQ(states(th), ref);
  // Through the Schmidt route as long as the coefficient order is unchanged.
  auto schmidt_states = [&](double th) {
    std::vector<std::pair<Statevector, Statevector>> out;
    for (const auto& t : pure_state_qpd(resource(th), 2, 2, 3).terms) out.emplace_back(t.state_a, t.state_b);
    return out;
  };
  EXPECT_EQ(schmidt_states(0.4), schmidt_states(1.1));
}

TEST(PureStateQpd, RankFourAlphaFour) {
  std::mt19937_64 rng(4);
  const auto v = oracle::random_state(16, rng);
  const auto psi = oracle::to_state(v);
  const auto q = pure_state_qpd(psi, 4, 4, 4);
  EXPECT_EQ(q.terms.size(), 52u);
  EXPECT_LE(verify_qpd(q, projector(psi)), 1e-10);
}

TEST(PureStateQpd, Errors) {
  EXPECT_THROW(pure_state_qpd(resource(0.3), 2, 2, 2), std::invalid_argument);
  EXPECT_THROW(pure_state_qpd(resource(0.3), 2, 3, 4), std::invalid_argument);
}

TEST(VerifyQpd, SensitivityAndEmpty) {
  const auto psi = resource(1.0);
  auto q = pure_state_qpd(psi, 2, 2);
  EXPECT_LE(verify_qpd(q, projector(psi)), 1e-10);
  q.terms[3].coefficient += 1e-3;
  EXPECT_GE(verify_qpd(q, projector(psi)), 1e-4);
  EXPECT_EQ(verify_qpd(QPD{}, DensityMatrix::zero(4)), 0.0);
}

// Random bipartite states: optimal kappa, exact term count, valid local states,
// unique labels.
TEST(PureStateQpdProperty, RandomStates) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t da = std::size_t{1} << (1 + trial % 3), db = std::size_t{1} << (1 + (trial / 3) % 3);
    const int alpha = 3 + trial % 3;
    const auto psi = oracle::to_state(oracle::random_state(da * db, rng));
    const auto q = pure_state_qpd(psi, da, db, alpha);
    const auto sd = schmidt_decompose(psi, da, db);
    const std::size_t m = sd.rank();
    double sum_c = 0.0;
    for (double c : sd.coefficients) sum_c += c;
    EXPECT_NEAR(q.kappa, 2 * sum_c * sum_c - 1, 1e-12);
    EXPECT_EQ(q.terms.size(), m + alpha * m * (m - 1));
    EXPECT_LE(verify_qpd(q, projector(psi)), 1e-10);
    std::set<std::string> labels;
    for (const auto& t : q.terms) {
      EXPECT_NEAR(t.state_a.norm(), 1.0, 1e-10);
      EXPECT_NEAR(t.state_b.norm(), 1.0, 1e-10);
      labels.insert(t.label.str());
    }
    EXPECT_EQ(labels.size(), q.terms.size());
  }
}

// Negating one coefficient gives a decomposition of the sign-flipped state
// with the same magnitudes.
TEST(PureStateQpdProperty, SignFlipClosure) {
  std::mt19937_64 rng(13);
  std::vector<Statevector> basis;
  for (std::size_t j = 0; j < 4; ++j) basis.push_back(Statevector::basis(4, j));
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> c(4);
    double n = 0.0;
    for (auto& x : c) {
      x = std::abs(std::normal_distribution<double>()(rng));
      n += x * x;
    }
    for (auto& x : c) x /= std::sqrt(n);
    const std::size_t flip = trial % 4;
    auto cf = c;
    cf[flip] = -cf[flip];
    const auto q = qpd_from_expansion(c, basis, basis, 4);
    const auto qf = qpd_from_expansion(cf, basis, basis, 4);
    std::vector<Complex> amps(16);
    for (std::size_t j = 0; j < 4; ++j) amps[j * 4 + j] = cf[j];
    EXPECT_LE(verify_qpd(qf, projector(Statevector::from_amplitudes(amps))), 1e-10);
    ASSERT_EQ(q.terms.size(), qf.terms.size());
    for (std::size_t t = 0; t < q.terms.size(); ++t) {
      EXPECT_NEAR(std::abs(q.terms[t].coefficient), std::abs(qf.terms[t].coefficient), 1e-15);
      EXPECT_EQ(q.terms[t].state_a, qf.terms[t].state_a);
    }
  }
}

TEST(QpdTerm, OutcomeSignRule) {
  QPDTerm t;
  t.label = {QPDLabel::Kind::Cross, 0b10, 0b01, 1, +1};  // differs at both positions
  const int k[] = {1, 0}, l[] = {0, 0};
  EXPECT_EQ(t.outcome_sign(k, l), -1);
  const int k2[] = {1, 1}, l2[] = {0, 0};
  EXPECT_EQ(t.outcome_sign(k2, l2), 1);
  t.label = {QPDLabel::Kind::Cross, 0b10, 0b00, 1, +1};  // differs at position 0 only
  const int k3[] = {0, 1}, l3[] = {0, 0};
  EXPECT_EQ(t.outcome_sign(k3, l3), 1);
  t.label = {QPDLabel::Kind::Diagonal, 3, 3};
  EXPECT_EQ(t.outcome_sign(k, l), 1);
}

}  // namespace
