#pragma once

// Operationally uncertain measurements. An uncertain union of the events
// {A_n} is represented by the state |A> = sum_n a_n |n> and the proposition
// operator |A><A|, which is not a projector; its probability splits into a
// diagonal part and an interference term.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qprob/error.hpp"
#include "qprob/events.hpp"
#include "qprob/linalg.hpp"

namespace qprob {

// Complex amplitudes with sum |w|^2 = 1.
class ModeWeights {
 public:
  explicit ModeWeights(std::vector<cplx> w, double tol = kDefaultTol) : w_(std::move(w)) {
    if (w_.empty()) throw InvalidArgument("ModeWeights: empty weight vector");
    detail::require_finite(w_, "ModeWeights");
    double n2 = 0.0;
    for (const auto& z : w_) n2 += std::norm(z);
    if (std::abs(n2 - 1.0) >= tol) {
      throw InvalidArgument("ModeWeights: sum |w|^2 = " + std::to_string(n2) + " is not 1");
    }
  }

  static ModeWeights normalized(std::vector<cplx> w) {
    double n2 = 0.0;
    for (const auto& z : w) n2 += std::norm(z);
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw InvalidArgument("ModeWeights::normalized: zero or non-finite norm");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& z : w) z *= inv;
    return ModeWeights(std::move(w));
  }

  static ModeWeights basis(std::size_t d, std::size_t k) {
    if (k >= d) throw IndexOutOfRange("ModeWeights::basis: index out of range");
    std::vector<cplx> w(d, cplx{});
    w[k] = 1.0;
    return ModeWeights(std::move(w));
  }

  static ModeWeights uniform(std::size_t d) { return normalized(std::vector<cplx>(d, cplx{1.0, 0.0})); }

  std::size_t size() const noexcept { return w_.size(); }
  const cplx& operator[](std::size_t i) const { return w_[i]; }
  const std::vector<cplx>& values() const noexcept { return w_; }

 private:
  std::vector<cplx> w_;
};

struct UncertainUnion {
  Observable observable;
  ModeWeights weights;

  UncertainUnion(Observable obs, ModeWeights w) : observable(std::move(obs)), weights(std::move(w)) {
    if (weights.size() != observable.dim()) throw DimensionMismatch("UncertainUnion: weight count differs from observable dimension");
  }
};

// |A> = sum_n a_n |n>
inline Vector uncertain_state(const UncertainUnion& u) {
  Vector a(u.observable.dim());
  for (std::size_t n = 0; n < u.observable.dim(); ++n) a += u.weights[n] * u.observable.eigenvector(n);
  return a;
}

inline Matrix proposition_operator(const UncertainUnion& u) {
  const Vector a = uncertain_state(u);
  return outer(a, a);
}

struct UncertainProbability {
  double p;     // Tr rho P_A
  double diag;  // sum_n |a_n|^2 p(A_n)
  double q;     // interference term, p - diag
};

inline UncertainProbability uncertain_probability(const DensityOperator& rho, const UncertainUnion& u,
                                                  double tol = kDefaultTol) {
  const Matrix r = in_eigenbasis(rho, u.observable);
  const std::size_t d = r.rows();
  double diag = 0.0;
  cplx q{};
  for (std::size_t m = 0; m < d; ++m) {
    diag += std::norm(u.weights[m]) * r(m, m).real();
    for (std::size_t n = 0; n < d; ++n) {
      if (m != n) q += std::conj(u.weights[m]) * u.weights[n] * r(m, n);
    }
  }
  if (std::abs(q.imag()) >= tol) {
    throw NumericalError("uncertain_probability: interference term has imaginary residue " + std::to_string(q.imag()));
  }
  const double p = clamp_probability(diag + q.real(), "uncertain_probability");
  return {p, diag, q.real()};
}

}  // namespace qprob
