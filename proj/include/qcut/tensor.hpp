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

// Dense complex linear algebra used by every other qcut module.
//
// Conventions (fixed library-wide):
//   * Qubit 0 is the leftmost tensor factor, i.e. the most significant bit of
//     a basis index (big-endian amplitudes).
//   * Superoperators act on column-stacked density matrices:
//     vec(rho)[i + j * D] = rho(i, j), so vec(K rho K^dag) = (conj(K) (x) K) vec(rho).

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcut {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Schmidt coefficients and singular values below this are treated as zero.
inline constexpr double kPruneTolerance = 1e-12;

/// Tolerance for unitarity, normalization and Hermiticity checks.
inline constexpr double kStateTolerance = 1e-10;

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("dimension " + std::to_string(n) + " is not a power of two");
  }
  std::size_t q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  return q;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrix

/// Dense row-major complex matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
      throw std::invalid_argument("Matrix: entry count does not match rows x cols");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const Complex> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> entries() { return data_; }
  std::span<const Complex> entries() const { return data_; }

  Matrix adjoint() const {
    Matrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
  }

  Matrix transpose() const {
    Matrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
  }

  Matrix conjugate() const {
    Matrix m = *this;
    for (auto& x : m.data_) x = std::conj(x);
    return m;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& x : data_) s += std::norm(x);
    return std::sqrt(s);
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Matrix product: inner dimensions differ");
    Matrix m(a.rows_, b.cols_);
    for (std::size_t r = 0; r < a.rows_; ++r)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Complex x = a(r, k);
        if (x == Complex{}) continue;
        for (std::size_t c = 0; c < b.cols_; ++c) m(r, c) += x * b(k, c);
      }
    return m;
  }

  friend std::vector<Complex> operator*(const Matrix& a, std::span<const Complex> v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("Matrix-vector product: size mismatch");
    std::vector<Complex> out(a.rows_);
    for (std::size_t r = 0; r < a.rows_; ++r) {
      Complex s = 0.0;
      for (std::size_t c = 0; c < a.cols_; ++c) s += a(r, c) * v[c];
      out[r] = s;
    }
    return out;
  }

  /// ||U^dag U - I||_F <= tol.
  bool is_unitary(double tol = kStateTolerance) const {
    if (!is_square()) return false;
    return (adjoint() * (*this) - identity(rows_)).frobenius_norm() <= tol;
  }

  bool is_hermitian(double tol = kStateTolerance) const {
    if (!is_square()) return false;
    return ((*this) - adjoint()).frobenius_norm() <= tol;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw std::invalid_argument("Matrix: shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex x = a(ar, ac);
      if (x == Complex{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          m(ar * b.rows() + br, ac * b.cols() + bc) = x * b(br, bc);
    }
  return m;
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("frobenius_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) s += std::norm(a.entries()[i] - b.entries()[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Common gate matrices

namespace mat {

inline Matrix identity2() { return Matrix::identity(2); }
inline Matrix pauli_x() { return Matrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
inline Matrix pauli_z() { return Matrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }
inline Matrix hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  return Matrix(2, 2, {h, h, h, -h});
}
inline Matrix phase_s() { return Matrix(2, 2, {1.0, 0.0, 0.0, Complex{0.0, 1.0}}); }
inline Matrix phase_sdg() { return Matrix(2, 2, {1.0, 0.0, 0.0, Complex{0.0, -1.0}}); }

/// exp(-i angle/2 Z)
inline Matrix rz(double angle) {
  return Matrix(2, 2, {std::polar(1.0, -angle / 2), 0.0, 0.0, std::polar(1.0, angle / 2)});
}

/// cos(theta/2) I(x)I - i sin(theta/2) Z(x)Z
inline Matrix rzz(double theta) {
  const Complex lo = std::polar(1.0, -theta / 2);
  const Complex hi = std::polar(1.0, theta / 2);
  const Complex d[] = {lo, hi, hi, lo};
  return Matrix::diagonal(d);
}

/// exp(-i angle/2 Z^{(x)n}) on n qubits.
inline Matrix multi_rz(double angle, std::size_t n) {
  std::vector<Complex> d(std::size_t{1} << n);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool odd = std::popcount(i) % 2 == 1;
    d[i] = std::polar(1.0, odd ? angle / 2 : -angle / 2);
  }
  return Matrix::diagonal(d);
}

/// Control is qubit 0 (leftmost).
inline Matrix cnot() {
  Matrix m(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

}  // namespace mat

// ---------------------------------------------------------------------------
// States

/// Pure state. The dimension is usually 2^n but any positive dimension is
/// accepted so that Schmidt bases of odd-sized factors can be represented.
class Statevector {
 public:
  Statevector() = default;

  /// |0...0> on num_qubits qubits.
  explicit Statevector(std::size_t num_qubits) : amps_(std::size_t{1} << num_qubits) { amps_[0] = 1.0; }

  /// Throws if the amplitudes are not normalized within kStateTolerance.
  static Statevector from_amplitudes(std::vector<Complex> amps) {
    Statevector s;
    s.amps_ = std::move(amps);
    if (s.amps_.empty()) throw std::invalid_argument("Statevector: empty amplitude vector");
    if (std::abs(s.norm() - 1.0) > kStateTolerance) {
      throw std::invalid_argument("Statevector: amplitudes are not normalized");
    }
    return s;
  }

  /// Rescales to unit norm; throws on the zero vector.
  static Statevector normalized(std::vector<Complex> amps) {
    double n = 0.0;
    for (const auto& a : amps) n += std::norm(a);
    n = std::sqrt(n);
    if (n == 0.0) throw std::invalid_argument("Statevector: cannot normalize the zero vector");
    for (auto& a : amps) a /= n;
    return from_amplitudes(std::move(amps));
  }

  static Statevector basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::out_of_range("Statevector::basis: index out of range");
    std::vector<Complex> a(dim);
    a[index] = 1.0;
    return from_amplitudes(std::move(a));
  }

  std::size_t dimension() const { return amps_.size(); }
  std::size_t num_qubits() const { return detail::log2_exact(amps_.size()); }
  std::span<const Complex> amplitudes() const { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
  }

  friend bool operator==(const Statevector&, const Statevector&) = default;

 private:
  std::vector<Complex> amps_;
};

inline Complex inner(const Statevector& a, const Statevector& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("inner: dimension mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline Statevector kron(const Statevector& a, const Statevector& b) {
  std::vector<Complex> out(a.dimension() * b.dimension());
  for (std::size_t i = 0; i < a.dimension(); ++i)
    for (std::size_t j = 0; j < b.dimension(); ++j) out[i * b.dimension() + j] = a[i] * b[j];
  return Statevector::from_amplitudes(std::move(out));
}

inline Statevector apply(const Matrix& u, const Statevector& s) {
  return Statevector::normalized(u * s.amplitudes());
}

/// |<a|b>|^2
inline double fidelity(const Statevector& a, const Statevector& b) { return std::norm(inner(a, b)); }

/// Reorders qubits: qubit k of the result is qubit order[k] of the input.
inline Statevector permute_qubits(const Statevector& s, std::span<const std::size_t> order) {
  const std::size_t n = s.num_qubits();
  if (order.size() != n) throw std::invalid_argument("permute_qubits: order has wrong length");
  std::vector<bool> seen(n, false);
  for (auto q : order) {
    if (q >= n || seen[q]) throw std::invalid_argument("permute_qubits: order is not a permutation");
    seen[q] = true;
  }
  std::vector<Complex> out(s.dimension());
  for (std::size_t idx = 0; idx < s.dimension(); ++idx) {
    std::size_t src = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t bit = (idx >> (n - 1 - k)) & 1U;
      src |= bit << (n - 1 - order[k]);
    }
    out[idx] = s[src];
  }
  return Statevector::from_amplitudes(std::move(out));
}

/// Density operator. Physicality (unit trace, PSD) is not enforced because
/// quasi-probability sums of states are routinely compared against it.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (!m_.is_hermitian()) throw std::invalid_argument("DensityMatrix: matrix must be Hermitian");
  }

  static DensityMatrix zero(std::size_t dim) { return DensityMatrix(Matrix(dim, dim)); }

  static DensityMatrix from_pure(const Statevector& s) {
    const std::size_t d = s.dimension();
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) m(i, j) = s[i] * std::conj(s[j]);
    return DensityMatrix(std::move(m));
  }

  std::size_t dimension() const { return m_.rows(); }
  std::size_t num_qubits() const { return detail::log2_exact(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

inline DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.matrix(), b.matrix()));
}

inline double frobenius_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return frobenius_distance(a.matrix(), b.matrix());
}

// ---------------------------------------------------------------------------
// Superoperators

/// Linear map on column-stacked density matrices of `dimension()` levels.
class SuperOperator {
 public:
  SuperOperator() = default;
  explicit SuperOperator(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw std::invalid_argument("SuperOperator: matrix must be square");
    const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m_.rows()))));
    if (d * d != m_.rows()) throw std::invalid_argument("SuperOperator: size is not a square of a dimension");
    dim_ = d;
  }

  static SuperOperator zero(std::size_t dim) { return SuperOperator(Matrix(dim * dim, dim * dim)); }
  static SuperOperator identity(std::size_t dim) { return SuperOperator(Matrix::identity(dim * dim)); }

  std::size_t dimension() const { return dim_; }
  std::size_t num_qubits() const { return detail::log2_exact(dim_); }
  const Matrix& matrix() const { return m_; }
  Matrix& mutable_matrix() { return m_; }

  DensityMatrix apply(const DensityMatrix& rho) const {
    if (rho.dimension() != dim_) throw std::invalid_argument("SuperOperator::apply: dimension mismatch");
    std::vector<Complex> v(dim_ * dim_);
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t i = 0; i < dim_; ++i) v[i + j * dim_] = rho.matrix()(i, j);
    const auto out = m_ * std::span<const Complex>(v);
    Matrix r(dim_, dim_);
    for (std::size_t j = 0; j < dim_; ++j)
      for (std::size_t i = 0; i < dim_; ++i) r(i, j) = out[i + j * dim_];
    return DensityMatrix(std::move(r));
  }

  /// (this o first): apply `first`, then this.
  SuperOperator after(const SuperOperator& first) const { return SuperOperator(m_ * first.m_); }

  bool is_trace_preserving(double tol = kStateTolerance) const {
    for (std::size_t col = 0; col < m_.cols(); ++col) {
      Complex t = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) t += m_(i + i * dim_, col);
      const bool diag = (col % dim_) == (col / dim_);
      if (std::abs(t - (diag ? 1.0 : 0.0)) > tol) return false;
    }
    return true;
  }

  SuperOperator& operator+=(const SuperOperator& o) {
    m_ += o.m_;
    return *this;
  }
  SuperOperator& operator*=(double s) {
    m_ *= s;
    return *this;
  }

 private:
  Matrix m_;
  std::size_t dim_ = 0;
};

inline double frobenius_distance(const SuperOperator& a, const SuperOperator& b) {
  return frobenius_distance(a.matrix(), b.matrix());
}

namespace detail {

/// S += w * conj(K) (x) K, skipping structural zeros of K.
inline void accumulate_kraus(Matrix& s, const Matrix& k, double w) {
  const std::size_t d_out = k.rows();
  const std::size_t d_in = k.cols();
  std::vector<std::pair<std::size_t, Complex>> nz;  // (row * d_in + col, value)
  for (std::size_t r = 0; r < d_out; ++r)
    for (std::size_t c = 0; c < d_in; ++c)
      if (k(r, c) != Complex{}) nz.emplace_back(r * d_in + c, k(r, c));
  for (const auto& [jl, kjl] : nz) {
    const std::size_t j = jl / d_in, l = jl % d_in;
    const Complex cj = w * std::conj(kjl);
    for (const auto& [ik, kik] : nz) {
      const std::size_t i = ik / d_in, kk = ik % d_in;
      s(i + j * d_out, kk + l * d_in) += cj * kik;
    }
  }
}

}  // namespace detail

inline SuperOperator unitary_to_superop(const Matrix& u) {
  if (!u.is_unitary()) throw std::invalid_argument("unitary_to_superop: matrix is not unitary");
  Matrix s(u.rows() * u.rows(), u.rows() * u.rows());
  detail::accumulate_kraus(s, u, 1.0);
  return SuperOperator(std::move(s));
}

/// Sum_k conj(K) (x) K. Complete positivity / trace preservation is the
/// caller's concern.
inline SuperOperator kraus_to_superop(std::span<const Matrix> ks) {
  if (ks.empty()) throw std::invalid_argument("kraus_to_superop: no Kraus operators");
  const std::size_t d = ks.front().rows();
  for (const auto& k : ks) {
    if (k.rows() != d || k.cols() != d) throw std::invalid_argument("kraus_to_superop: inconsistent dimensions");
  }
  Matrix s(d * d, d * d);
  for (const auto& k : ks) detail::accumulate_kraus(s, k, 1.0);
  return SuperOperator(std::move(s));
}

/// ||S - conj(U) (x) U||_F without materializing the unitary's superoperator.
inline double frobenius_distance_to_unitary(const SuperOperator& s, const Matrix& u) {
  const std::size_t d = u.rows();
  if (s.dimension() != d) throw std::invalid_argument("frobenius_distance_to_unitary: dimension mismatch");
  const Matrix& m = s.matrix();
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      const std::size_t row = i + j * d;
      for (std::size_t l = 0; l < d; ++l) {
        const Complex cjl = std::conj(u(j, l));
        for (std::size_t k = 0; k < d; ++k) acc += std::norm(m(row, k + l * d) - cjl * u(i, k));
      }
    }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// SVD (one-sided Jacobi)

struct SvdResult {
  Matrix u;                       ///< rows x r, orthonormal columns
  std::vector<double> singular;   ///< r values, descending
  Matrix v;                       ///< cols x r, orthonormal columns; A = U diag(s) V^dag
};

namespace detail {

inline SvdResult jacobi_svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix g = a;
  Matrix v = Matrix::identity(n);
  constexpr double eps = 1e-15;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += std::norm(g(r, p));
          beta += std::norm(g(r, q));
          gamma += std::conj(g(r, p)) * g(r, q);
        }
        const double ag = std::abs(gamma);
        if (ag <= eps * std::sqrt(alpha * beta) || ag < 1e-300) continue;
        rotated = true;
        const Complex phase = gamma / ag;
        const double zeta = (beta - alpha) / (2.0 * ag);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex ps = std::conj(phase) * s;
        const Complex qs = phase * s;
        for (std::size_t r = 0; r < m; ++r) {
          const Complex gp = g(r, p), gq = g(r, q);
          g(r, p) = c * gp - ps * gq;
          g(r, q) = qs * gp + c * gq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const Complex vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - ps * vq;
          v(r, q) = qs * vp + c * vq;
        }
      }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += std::norm(g(r, c));
    sv[c] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sv[x] > sv[y]; });

  SvdResult out{Matrix(m, n), std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t c = order[k];
    out.singular[k] = sv[c];
    for (std::size_t r = 0; r < n; ++r) out.v(r, k) = v(r, c);
    if (sv[c] > 0.0)
      for (std::size_t r = 0; r < m; ++r) out.u(r, k) = g(r, c) / sv[c];
  }
  return out;
}

}  // namespace detail

/// Thin SVD A = U diag(s) V^dag. Columns of U belonging to zero singular
/// values are left as zero vectors.
inline SvdResult svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
  if (a.rows() >= a.cols()) return detail::jacobi_svd_tall(a);
  auto t = detail::jacobi_svd_tall(a.adjoint());
  return SvdResult{std::move(t.v), std::move(t.singular), std::move(t.u)};
}

// ---------------------------------------------------------------------------
// Schmidt decomposition and Choi states

struct SchmidtDecomposition {
  std::vector<double> coefficients;  ///< positive, descending, pruned below kPruneTolerance
  std::vector<Statevector> left_basis;
  std::vector<Statevector> right_basis;
  std::size_t dim_a = 0;
  std::size_t dim_b = 0;

  std::size_t rank() const { return coefficients.size(); }

  std::vector<Complex> reconstruct() const {
    std::vector<Complex> out(dim_a * dim_b);
    for (std::size_t k = 0; k < rank(); ++k)
      for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j)
          out[i * dim_b + j] += coefficients[k] * left_basis[k][i] * right_basis[k][j];
    return out;
  }
};

/// Schmidt decomposition of psi across the first dim_a | last dim_b factors.
inline SchmidtDecomposition schmidt_decompose(const Statevector& psi, std::size_t dim_a, std::size_t dim_b) {
  if (dim_a == 0 || dim_b == 0 || dim_a * dim_b != psi.dimension()) {
    throw std::invalid_argument("schmidt_decompose: dim_a * dim_b must equal the state dimension");
  }
  Matrix m(dim_a, dim_b, std::vector<Complex>(psi.amplitudes().begin(), psi.amplitudes().end()));
  const auto s = svd(m);
  SchmidtDecomposition out;
  out.dim_a = dim_a;
  out.dim_b = dim_b;
  for (std::size_t k = 0; k < s.singular.size(); ++k) {
    if (s.singular[k] < kPruneTolerance) continue;
    out.coefficients.push_back(s.singular[k]);
    std::vector<Complex> left(dim_a), right(dim_b);
    for (std::size_t i = 0; i < dim_a; ++i) left[i] = s.u(i, k);
    // M = sum_k s_k u_k v_k^dag, so the right factor is conj(v_k).
    for (std::size_t j = 0; j < dim_b; ++j) right[j] = std::conj(s.v(j, k));
    out.left_basis.push_back(Statevector::normalized(std::move(left)));
    out.right_basis.push_back(Statevector::normalized(std::move(right)));
  }
  return out;
}

/// (U (x) I)|Omega> with |Omega> = sum_x |x>|x> / sqrt(d); system qubits come
/// first, reference qubits second.
inline Statevector choi_state(const Matrix& u) {
  if (!u.is_unitary()) throw std::invalid_argument("choi_state: matrix is not unitary");
  const std::size_t d = u.rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<Complex> amps(d * d);
  for (std::size_t x = 0; x < d; ++x)
    for (std::size_t y = 0; y < d; ++y) amps[x * d + y] = u(x, y) * scale;
  return Statevector::from_amplitudes(std::move(amps));
}

/// Schmidt coefficients of the Choi state of u across the cut that places
/// the first log2(dim_a) gate qubits (with their reference copies) in A.
inline std::vector<double> choi_schmidt_coefficients(const Matrix& u, std::size_t dim_a, std::size_t dim_b) {
  if (u.rows() != dim_a * dim_b) throw std::invalid_argument("choi_schmidt_coefficients: dimension mismatch");
  const std::size_t qa = detail::log2_exact(dim_a);
  const std::size_t qb = detail::log2_exact(dim_b);
  const std::size_t q = qa + qb;
  // Choi layout: [sys_A, sys_B, ref_A, ref_B] -> [sys_A, ref_A, sys_B, ref_B]
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < qa; ++k) order.push_back(k);
  for (std::size_t k = 0; k < qa; ++k) order.push_back(q + k);
  for (std::size_t k = 0; k < qb; ++k) order.push_back(qa + k);
  for (std::size_t k = 0; k < qb; ++k) order.push_back(q + qa + k);
  const auto choi = permute_qubits(choi_state(u), order);
  return schmidt_decompose(choi, dim_a * dim_a, dim_b * dim_b).coefficients;
}

}  // namespace qcut
