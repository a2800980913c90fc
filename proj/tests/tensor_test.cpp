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

#include "oracle.hpp"
#include "qcut/tensor.hpp"

namespace {

using qcut::Complex;
using qcut::Matrix;
using qcut::Statevector;
namespace mat = qcut::mat;

TEST(Kron, IdentityAndZ) {
  EXPECT_EQ(qcut::frobenius_distance(qcut::kron(mat::identity2(), mat::identity2()), Matrix::identity(4)), 0.0);
  const Complex d[] = {1.0, -1.0, -1.0, 1.0};
  EXPECT_EQ(qcut::frobenius_distance(qcut::kron(mat::pauli_z(), mat::pauli_z()), Matrix::diagonal(d)), 0.0);
}

TEST(Kron, RzzFromPauliExpansion) {
  for (double th : {0.0, 0.3, 1.2, 3.0, -2.2}) {
    const Matrix zz = qcut::kron(mat::pauli_z(), mat::pauli_z());
    const Matrix m = std::cos(th / 2) * Matrix::identity(4) + Complex{0.0, -std::sin(th / 2)} * zz;
    EXPECT_LT(qcut::frobenius_distance(m, mat::rzz(th)), 1e-14);
  }
}

TEST(Kron, MatchesEigen) {
  std::mt19937_64 rng(5);
  const auto a = oracle::random_unitary(4, rng), b = oracle::random_unitary(2, rng);
  const auto k = qcut::kron(oracle::from_eigen(a), oracle::from_eigen(b));
  EXPECT_LT(oracle::distance(k, Eigen::kroneckerProduct(a, b).eval()), 1e-13);
}

TEST(Schmidt, BellState) {
  const double h = 1.0 / std::sqrt(2.0);
  const auto sd = qcut::schmidt_decompose(Statevector::from_amplitudes({h, 0.0, 0.0, h}), 2, 2);
  ASSERT_EQ(sd.rank(), 2u);
  EXPECT_NEAR(sd.coefficients[0], h, 1e-12);
  EXPECT_NEAR(sd.coefficients[1], h, 1e-12);
}

TEST(Schmidt, ProductState) {
  const auto sd = qcut::schmidt_decompose(Statevector::basis(4, 1), 2, 2);
  ASSERT_EQ(sd.rank(), 1u);
  EXPECT_NEAR(sd.coefficients[0], 1.0, 1e-12);
}

TEST(Schmidt, TeleportationResourceAtPiOverThree) {
  const double th = qcut::kPi / 3;
  const auto psi = Statevector::from_amplitudes({std::cos(th / 2), 0.0, 0.0, std::sin(th / 2)});
  const auto sd = qcut::schmidt_decompose(psi, 2, 2);
  ASSERT_EQ(sd.rank(), 2u);
  EXPECT_NEAR(sd.coefficients[0], std::sqrt(3.0) / 2, 1e-12);
  EXPECT_NEAR(sd.coefficients[1], 0.5, 1e-12);
}

TEST(Schmidt, DimensionMismatchThrows) {
  EXPECT_THROW(qcut::schmidt_decompose(Statevector(3), 2, 2), std::invalid_argument);
}

// 1000 random states on up to 8 qubits with random bipartitions.
TEST(SchmidtProperty, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nq(2, 8);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = nq(rng);
    const int na = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const std::size_t da = std::size_t{1} << na, db = std::size_t{1} << (n - na);
    const auto v = oracle::random_state(da * db, rng);
    const auto sd = qcut::schmidt_decompose(oracle::to_state(v), da, db);
    const auto rec = sd.reconstruct();
    double err = 0.0;
    for (std::size_t i = 0; i < rec.size(); ++i) err += std::norm(rec[i] - v(i));
    worst = std::max(worst, std::sqrt(err));
    double s2 = 0.0;
    for (double c : sd.coefficients) s2 += c * c;
    ASSERT_NEAR(s2, 1.0, 1e-10);
    for (std::size_t a = 0; a < sd.rank(); ++a)
      for (std::size_t b = 0; b < sd.rank(); ++b) {
        const double want = a == b ? 1.0 : 0.0;
        ASSERT_NEAR(std::abs(qcut::inner(sd.left_basis[a], sd.left_basis[b]) - want), 0.0, 1e-10);
        ASSERT_NEAR(std::abs(qcut::inner(sd.right_basis[a], sd.right_basis[b]) - want), 0.0, 1e-10);
      }
    ASSERT_TRUE(std::is_sorted(sd.coefficients.rbegin(), sd.coefficients.rend()));
    if (trial % 10 == 0) {
      // Singular values against Eigen's SVD of the same reshaped matrix.
      Eigen::Map<const Eigen::Matrix<oracle::Cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(v.data(), da, db);
      const oracle::EMat dense = m;
      Eigen::JacobiSVD<oracle::EMat> svd(dense);
      const auto& sv = svd.singularValues();
      for (std::size_t k = 0; k < sd.rank(); ++k) ASSERT_NEAR(sd.coefficients[k], sv(k), 1e-10);
    }
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Svd, RandomRectangularAgainstEigen) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (auto [r, c] : {std::pair{7, 3}, std::pair{3, 7}, std::pair{16, 16}, std::pair{64, 64}}) {
    Matrix a(r, c);
    for (auto& x : a.entries()) x = Complex{g(rng), g(rng)};
    const auto s = qcut::svd(a);
    Eigen::JacobiSVD<oracle::EMat> ref(oracle::to_eigen(a));
    for (std::size_t k = 0; k < s.singular.size(); ++k) EXPECT_NEAR(s.singular[k], ref.singularValues()(k), 1e-10);
    // A = U diag(s) V^dag
    oracle::EMat u = oracle::to_eigen(s.u), v = oracle::to_eigen(s.v);
    oracle::EMat sd = oracle::EMat::Zero(s.singular.size(), s.singular.size());
    for (std::size_t k = 0; k < s.singular.size(); ++k) sd(k, k) = s.singular[k];
    EXPECT_LT((u * sd * v.adjoint() - oracle::to_eigen(a)).norm(), 1e-10);
  }
}

TEST(Choi, IdentityGivesBellState) {
  const auto c = qcut::choi_state(Matrix::identity(2));
  const double h = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(c[0] - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[3] - h), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c[1]) + std::abs(c[2]), 0.0, 1e-15);
}

TEST(Choi, CnotAcrossControlTarget) {
  const auto c = qcut::choi_schmidt_coefficients(mat::cnot(), 2, 2);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c[1], 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Choi, NonUnitaryThrows) { EXPECT_THROW(qcut::choi_state(mat::pauli_z() * 2.0), std::invalid_argument); }

// Diagonal unitaries: Choi Schmidt coefficients = those of the normalized diagonal.
TEST(ChoiProperty, DiagonalUnitariesMatchDiagonalVector) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ph(-qcut::kPi, qcut::kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const int qa = 1 + trial % 2, qb = 1 + (trial / 2) % 2;
    const std::size_t da = std::size_t{1} << qa, db = std::size_t{1} << qb;
    std::vector<Complex> d(da * db), dn(da * db);
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = std::polar(1.0, ph(rng));
      dn[i] = d[i] / std::sqrt(static_cast<double>(d.size()));
    }
    const auto choi = qcut::choi_schmidt_coefficients(Matrix::diagonal(d), da, db);
    const auto diag = qcut::schmidt_decompose(Statevector::from_amplitudes(dn), da, db).coefficients;
    ASSERT_EQ(choi.size(), diag.size());
    for (std::size_t k = 0; k < choi.size(); ++k) EXPECT_NEAR(choi[k], diag[k], 1e-10);
  }
}

TEST(Superop, IdentityAndZOnPlus) {
  EXPECT_EQ(qcut::frobenius_distance(qcut::unitary_to_superop(Matrix::identity(2)), qcut::SuperOperator::identity(2)),
            0.0);
  const double h = 0.5;
  const auto plus = qcut::DensityMatrix(Matrix(2, 2, {h, h, h, h}));
  const auto minus = qcut::DensityMatrix(Matrix(2, 2, {h, -h, -h, h}));
  EXPECT_LT(qcut::frobenius_distance(qcut::unitary_to_superop(mat::pauli_z()).apply(plus), minus), 1e-15);
}

TEST(Superop, MatchesConjugationOracle) {
  std::mt19937_64 rng(3);
  const auto u = oracle::random_unitary(4, rng);
  const auto s = qcut::unitary_to_superop(oracle::from_eigen(u));
  EXPECT_LT(oracle::distance(s.matrix(), oracle::superop(u)), 1e-12);
  const auto psi = oracle::random_state(4, rng);
  const oracle::EMat rho = psi * psi.adjoint();
  const auto out = s.apply(qcut::DensityMatrix(oracle::from_eigen(rho)));
  EXPECT_LT(oracle::distance(out.matrix(), u * rho * u.adjoint()), 1e-12);
  EXPECT_NEAR(out.trace().real(), 1.0, 1e-10);
  EXPECT_TRUE(out.matrix().is_hermitian());
}

// R_zz(pi/2) and CNOT differ by local unitaries only.
TEST(Superop, RzzQuarterTurnIsLocallyCnot) {
  const Matrix h = mat::hadamard();
  const Matrix ih = qcut::kron(mat::identity2(), h);
  const Matrix locals = qcut::kron(mat::rz(-qcut::kPi / 2), mat::rz(-qcut::kPi / 2));
  const Matrix zz = qcut::kron(mat::pauli_z(), mat::pauli_z());
  // CNOT = (I (x) H) CZ (I (x) H) and CZ ~ (RZ(pi/2) (x) RZ(pi/2)) R_zz(-pi/2) up to phase.
  const Matrix from_cnot = zz * locals * ih * mat::cnot() * ih;
  EXPECT_LT(qcut::frobenius_distance(qcut::unitary_to_superop(mat::rzz(qcut::kPi / 2)),
                                     qcut::unitary_to_superop(from_cnot)),
            1e-12);
}

TEST(Superop, DephasingFromProjectors) {
  const Matrix p0(2, 2, {1.0, 0.0, 0.0, 0.0}), p1(2, 2, {0.0, 0.0, 0.0, 1.0});
  const Matrix ks[] = {p0, p1};
  const auto s = qcut::kraus_to_superop(ks);
  const Complex d[] = {1.0, 0.0, 0.0, 1.0};
  EXPECT_EQ(qcut::frobenius_distance(s.matrix(), Matrix::diagonal(d)), 0.0);
  EXPECT_TRUE(s.is_trace_preserving());
}

TEST(Superop, ParityProjectorPairIsTracePreserving) {
  const Matrix zz = qcut::kron(mat::pauli_z(), mat::pauli_z());
  const Matrix p0 = 0.5 * (Matrix::identity(4) + zz), p1 = 0.5 * (Matrix::identity(4) - zz);
  const Matrix one[] = {p0};
  const auto s0 = qcut::kraus_to_superop(one);
  EXPECT_FALSE(s0.is_trace_preserving());
  Eigen::FullPivLU<oracle::EMat> lu(oracle::to_eigen(s0.matrix()));
  EXPECT_LT(lu.rank(), 16);
  const Matrix both[] = {p0, p1};
  EXPECT_TRUE(qcut::kraus_to_superop(both).is_trace_preserving());
}

TEST(Superop, InconsistentKrausThrows) {
  const Matrix ks[] = {Matrix::identity(2), Matrix::identity(4)};
  EXPECT_THROW(qcut::kraus_to_superop(ks), std::invalid_argument);
}

TEST(Superop, CompositionAndNormPreservation) {
  std::mt19937_64 rng(11);
  const auto a = oracle::random_unitary(4, rng), b = oracle::random_unitary(4, rng);
  const auto sa = qcut::unitary_to_superop(oracle::from_eigen(a));
  const auto sb = qcut::unitary_to_superop(oracle::from_eigen(b));
  const auto sab = qcut::unitary_to_superop(oracle::from_eigen(b * a));
  EXPECT_LT(qcut::frobenius_distance(sb.after(sa), sab), 1e-12);
  EXPECT_TRUE(sab.matrix().is_unitary());
}

TEST(Distance, Basics) {
  EXPECT_EQ(qcut::frobenius_distance(mat::pauli_x(), mat::pauli_x()), 0.0);
  EXPECT_NEAR(qcut::frobenius_distance(mat::identity2(), mat::pauli_z()), 2.0, 1e-15);
  EXPECT_THROW(qcut::frobenius_distance(Matrix::identity(2), Matrix::identity(4)), std::invalid_argument);
}

TEST(Distance, StreamingMatchesDense) {
  std::mt19937_64 rng(4);
  const auto u = oracle::random_unitary(4, rng), v = oracle::random_unitary(4, rng);
  const auto su = qcut::unitary_to_superop(oracle::from_eigen(u));
  EXPECT_NEAR(qcut::frobenius_distance_to_unitary(su, oracle::from_eigen(v)),
              (oracle::superop(u) - oracle::superop(v)).norm(), 1e-12);
}

TEST(Statevector, RejectsUnnormalized) {
  EXPECT_THROW(Statevector::from_amplitudes({1.0, 1.0}), std::invalid_argument);
}

}  // namespace
