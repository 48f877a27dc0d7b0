#pragma once

// Dense complex linear algebra for the small dimensions met in multimode
// measurement problems (d <= 64). Row-major storage, value semantics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qprob/error.hpp"

namespace qprob {

using cplx = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr std::size_t kMaxEigenDim = 64;
inline constexpr std::size_t kMaxEntries = std::size_t{1} << 20;

namespace detail {

inline void require_finite(std::span<const cplx> xs, const char* what) {
  for (const auto& z : xs) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace detail

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim) : data_(dim, cplx{0.0, 0.0}) {}
  Vector(std::initializer_list<cplx> xs) : data_(xs) {
    detail::require_finite(data_, "Vector");
  }
  explicit Vector(std::vector<cplx> xs) : data_(std::move(xs)) {
    detail::require_finite(data_, "Vector");
  }

  static Vector basis(std::size_t dim, std::size_t k) {
    if (k >= dim) throw IndexOutOfRange("basis index " + std::to_string(k) + " >= dim " + std::to_string(dim));
    Vector v(dim);
    v[k] = 1.0;
    return v;
  }

  std::size_t dim() const noexcept { return data_.size(); }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }
  std::span<const cplx> entries() const noexcept { return data_; }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  double norm2() const noexcept {
    double acc = 0.0;
    for (const auto& z : data_) acc += std::norm(z);
    return acc;
  }
  double norm() const noexcept { return std::sqrt(norm2()); }

  Vector& operator*=(cplx a) {
    for (auto& z : data_) z *= a;
    return *this;
  }
  Vector& operator+=(const Vector& o) {
    if (o.dim() != dim()) throw DimensionMismatch("vector add: dims differ");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

 private:
  std::vector<cplx> data_;
};

inline Vector operator*(cplx a, Vector v) { return v *= a; }
inline Vector operator+(Vector a, const Vector& b) { return a += b; }

// <u|v>, antilinear in the first argument.
inline cplx inner(const Vector& u, const Vector& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("inner: dims differ");
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < u.dim(); ++i) acc += std::conj(u[i]) * v[i];
  return acc;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < b.dim(); ++k) out[i * b.dim() + k] = a[i] * b[k];
  return out;
}

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(checked_size(rows, cols), cplx{0.0, 0.0}) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != checked_size(rows, cols)) {
      throw DimensionMismatch("Matrix: entry count does not match rows*cols");
    }
    detail::require_finite(data_, "Matrix");
  }
  // Row-major nested initializer, e.g. Matrix{{0, 1}, {1, 0}}.
  Matrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionMismatch("Matrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
    detail::require_finite(data_, "Matrix");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Matrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const cplx> entries() const noexcept { return data_; }

  Vector column(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  Matrix& operator+=(const Matrix& o) {
    same_shape(o, "matrix add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    same_shape(o, "matrix subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(cplx a) {
    for (auto& z : data_) z *= a;
    return *this;
  }

 private:
  static std::size_t checked_size(std::size_t rows, std::size_t cols) {
    if (rows != 0 && cols > kMaxEntries / rows) {
      throw InvalidArgument("Matrix: more than 2^20 entries requested");
    }
    return rows * cols;
  }
  void same_shape(const Matrix& o, const char* what) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch(std::string(what) + ": shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(cplx s, Matrix a) { return a *= s; }

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dims differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Vector operator*(const Matrix& a, const Vector& v) {
  if (a.cols() != v.dim()) throw DimensionMismatch("matvec: dims differ");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx acc{};
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  if (rows != 0 && cols > kMaxEntries / rows) throw InvalidArgument("kron: result exceeds 2^20 entries");
  Matrix c(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return c;
}

inline Matrix adjoint(const Matrix& a) {
  Matrix h(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) h(j, i) = std::conj(a(i, j));
  return h;
}

inline cplx trace(const Matrix& a) {
  if (!a.square()) throw DimensionMismatch("trace: matrix is not square");
  cplx acc{};
  for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, i);
  return acc;
}

// |u><v|
inline Matrix outer(const Vector& u, const Vector& v) {
  Matrix m(u.dim(), v.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < v.dim(); ++j) m(i, j) = u[i] * std::conj(v[j]);
  return m;
}

inline double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const auto& z : a.entries()) m = std::max(m, std::abs(z));
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

inline double hermiticity_defect(const Matrix& a) {
  if (!a.square()) throw DimensionMismatch("hermiticity check: matrix is not square");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

// Tr_B and Tr_A of an operator on C^dimA (x) C^dimB.
inline Matrix partial_trace_b(const Matrix& rho, std::size_t dimA, std::size_t dimB) {
  if (rho.rows() != dimA * dimB || !rho.square()) throw DimensionMismatch("partial_trace_b: dims");
  Matrix out(dimA, dimA);
  for (std::size_t i = 0; i < dimA; ++i)
    for (std::size_t j = 0; j < dimA; ++j)
      for (std::size_t k = 0; k < dimB; ++k) out(i, j) += rho(i * dimB + k, j * dimB + k);
  return out;
}

inline Matrix partial_trace_a(const Matrix& rho, std::size_t dimA, std::size_t dimB) {
  if (rho.rows() != dimA * dimB || !rho.square()) throw DimensionMismatch("partial_trace_a: dims");
  Matrix out(dimB, dimB);
  for (std::size_t k = 0; k < dimB; ++k)
    for (std::size_t l = 0; l < dimB; ++l)
      for (std::size_t i = 0; i < dimA; ++i) out(k, l) += rho(i * dimB + k, i * dimB + l);
  return out;
}

struct SpectralDecomposition {
  std::vector<double> eigenvalues;  // ascending
  std::vector<Vector> eigenvectors;

  std::size_t dim() const noexcept { return eigenvalues.size(); }

  // Unitary whose columns are the eigenvectors.
  Matrix basis_matrix() const {
    const std::size_t d = dim();
    Matrix u(d, d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) u(i, j) = eigenvectors[j][i];
    return u;
  }

  // Sum_n A_n |n><n|
  Matrix recompose() const {
    const std::size_t d = dim();
    Matrix a(d, d);
    for (std::size_t n = 0; n < d; ++n) a += cplx{eigenvalues[n], 0.0} * outer(eigenvectors[n], eigenvectors[n]);
    return a;
  }
};

// Cyclic complex Jacobi. Each (p, q) rotation first removes the phase of
// a(p,q) with a diagonal unitary, then applies the real symmetric rotation
// that zeroes the resulting 2x2 off-diagonal.
inline SpectralDecomposition hermitian_eigen(const Matrix& input, double tol = kDefaultTol) {
  if (!input.square()) throw DimensionMismatch("hermitian_eigen: matrix is not square");
  const std::size_t n = input.rows();
  if (n == 0) throw InvalidArgument("hermitian_eigen: empty matrix");
  if (n > kMaxEigenDim) throw InvalidArgument("hermitian_eigen: dimension exceeds 64");
  if (hermiticity_defect(input) >= tol) throw NotHermitian("hermitian_eigen: ||A - A^dagger||_max >= tol");

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  Matrix v = Matrix::identity(n);

  auto off_norm2 = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += std::norm(a(i, j));
    return s;
  };
  double scale2 = 0.0;
  for (const auto& z : a.entries()) scale2 += std::norm(z);
  const double stop2 = std::max(scale2, 1e-300) * 1e-32;

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm2() <= stop2) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const cplx phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const cplx pc = std::conj(phase);

        // A <- A U with U = [[c, s], [-s conj(e), c conj(e)]] on (p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * pc * akq;
          a(k, q) = s * akp + c * pc * akq;
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - s * pc * vkq;
          v(k, q) = s * vkp + c * pc * vkq;
        }
        // A <- U^dagger A
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (sweep == kMaxSweeps && off_norm2() > stop2) throw NoConvergence("hermitian_eigen: Jacobi sweeps exhausted");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  SpectralDecomposition out;
  out.eigenvalues.reserve(n);
  out.eigenvectors.reserve(n);
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a(idx, idx).real());
    out.eigenvectors.push_back(v.column(idx));
  }
  return out;
}

}  // namespace qprob
