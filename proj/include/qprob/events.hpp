#pragma once

// Operationally testable (projective) measurements: projectors built from an
// observable's spectrum, event probabilities Tr(rho P_n) and additive unions
// of mutually orthogonal events.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qprob/error.hpp"
#include "qprob/linalg.hpp"

namespace qprob {

// Largest amount a computed probability may stray outside [0, 1] before it is
// treated as a logic error instead of rounding dust.
inline constexpr double kClampSlack = 1e-9;

inline double clamp_probability(double p, const char* what) {
  if (p < -kClampSlack || p > 1.0 + kClampSlack || !std::isfinite(p)) {
    throw NumericalError(std::string(what) + ": probability " + std::to_string(p) + " outside [0,1]");
  }
  return std::clamp(p, 0.0, 1.0);
}

// Trace-one positive Hermitian matrix. Construction validates and never
// repairs its input.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m, double tol = kDefaultTol) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0) throw DimensionMismatch("DensityOperator: matrix must be square and non-empty");
    if (hermiticity_defect(m_) >= tol) throw NotHermitian("DensityOperator: matrix is not Hermitian");
    const cplx tr = trace(m_);
    if (std::abs(tr - cplx{1.0, 0.0}) >= tol) {
      throw InvalidArgument("DensityOperator: trace " + std::to_string(tr.real()) + " differs from 1");
    }
    if (m_.rows() <= kMaxEigenDim) {
      const auto spec = hermitian_eigen(m_, tol);
      if (spec.eigenvalues.front() < -tol) {
        throw InvalidArgument("DensityOperator: negative eigenvalue " + std::to_string(spec.eigenvalues.front()));
      }
    }
  }

  static DensityOperator pure(const Vector& psi, double tol = kDefaultTol) {
    const double n2 = psi.norm2();
    if (std::abs(n2 - 1.0) >= tol) throw InvalidArgument("DensityOperator::pure: state is not normalized");
    return DensityOperator(outer(psi, psi), tol);
  }

  const Matrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.rows(); }
  cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  // <u|rho|v>
  cplx element(const Vector& u, const Vector& v) const {
    if (u.dim() != dim() || v.dim() != dim()) throw DimensionMismatch("DensityOperator::element: dims");
    return inner(u, m_ * v);
  }

 private:
  Matrix m_;
};

class Observable {
 public:
  explicit Observable(SpectralDecomposition spectral, double tol = kDefaultTol) : spec_(std::move(spectral)) {
    const std::size_t d = spec_.eigenvalues.size();
    if (d == 0 || spec_.eigenvectors.size() != d) throw InvalidArgument("Observable: eigenvalue/eigenvector counts differ");
    for (std::size_t m = 0; m < d; ++m) {
      if (spec_.eigenvectors[m].dim() != d) throw DimensionMismatch("Observable: eigenvector dimension");
      for (std::size_t n = m; n < d; ++n) {
        const cplx g = inner(spec_.eigenvectors[m], spec_.eigenvectors[n]);
        if (std::abs(g - cplx{m == n ? 1.0 : 0.0, 0.0}) >= tol) {
          throw InvalidArgument("Observable: eigenvectors are not orthonormal");
        }
      }
    }
  }

  static Observable from_matrix(const Matrix& a, double tol = kDefaultTol) { return Observable(hermitian_eigen(a, tol), tol); }

  // Computational basis with eigenvalues 0, 1, ..., d-1.
  static Observable standard(std::size_t d) {
    SpectralDecomposition s;
    for (std::size_t n = 0; n < d; ++n) {
      s.eigenvalues.push_back(static_cast<double>(n));
      s.eigenvectors.push_back(Vector::basis(d, n));
    }
    return Observable(std::move(s));
  }

  std::size_t dim() const noexcept { return spec_.eigenvalues.size(); }
  const SpectralDecomposition& spectral() const noexcept { return spec_; }
  double eigenvalue(std::size_t n) const { return spec_.eigenvalues.at(n); }
  const Vector& eigenvector(std::size_t n) const { return spec_.eigenvectors.at(n); }

 private:
  SpectralDecomposition spec_;
};

inline Matrix projector(const Observable& obs, std::size_t n) {
  if (n >= obs.dim()) throw IndexOutOfRange("projector: index " + std::to_string(n) + " out of range");
  return outer(obs.eigenvector(n), obs.eigenvector(n));
}

inline void require_same_dim(const DensityOperator& rho, const Observable& obs, const char* what) {
  if (rho.dim() != obs.dim()) throw DimensionMismatch(std::string(what) + ": state and observable dimensions differ");
}

// p(A_n) = Tr rho P_n = <n|rho|n>
inline double event_probability(const DensityOperator& rho, const Observable& obs, std::size_t n) {
  require_same_dim(rho, obs, "event_probability");
  if (n >= obs.dim()) throw IndexOutOfRange("event_probability: index " + std::to_string(n) + " out of range");
  const auto& v = obs.eigenvector(n);
  return clamp_probability(rho.element(v, v).real(), "event_probability");
}

inline void require_distinct_indices(std::span<const std::size_t> idx, std::size_t dim, const char* what) {
  std::vector<bool> seen(dim, false);
  for (auto i : idx) {
    if (i >= dim) throw IndexOutOfRange(std::string(what) + ": index " + std::to_string(i) + " out of range");
    if (seen[i]) throw InvalidArgument(std::string(what) + ": duplicate index " + std::to_string(i));
    seen[i] = true;
  }
}

// Probability of the standard union of the listed events, Tr rho sum_n P_n.
inline double union_probability(const DensityOperator& rho, const Observable& obs, std::span<const std::size_t> indices) {
  require_same_dim(rho, obs, "union_probability");
  require_distinct_indices(indices, obs.dim(), "union_probability");
  Matrix sum(obs.dim(), obs.dim());
  for (auto n : indices) sum += projector(obs, n);
  return clamp_probability(trace(rho.matrix() * sum).real(), "union_probability");
}

// rho expressed in the observable's eigenbasis, U^dagger rho U.
inline Matrix in_eigenbasis(const DensityOperator& rho, const Observable& obs) {
  require_same_dim(rho, obs, "in_eigenbasis");
  const Matrix u = obs.spectral().basis_matrix();
  return adjoint(u) * rho.matrix() * u;
}

}  // namespace qprob
