#pragma once

// Composite events on C^dA (x) C^dB. A prospect joins the elementary event
// A_n with the uncertain union |B> = sum_a b_a |a>; its probability splits
// into a classical part f and an interference part q. Both factor bases are
// the computational bases; rotate the state first (to_factor_eigenbases) to
// measure other observables.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qprob/error.hpp"
#include "qprob/events.hpp"
#include "qprob/linalg.hpp"
#include "qprob/uncertain.hpp"

namespace qprob {

class CompositeState {
 public:
  CompositeState(DensityOperator rho, std::size_t dimA, std::size_t dimB)
      : rho_(std::move(rho)), dimA_(dimA), dimB_(dimB) {
    if (dimA == 0 || dimB == 0 || dimA * dimB != rho_.dim()) {
      throw DimensionMismatch("CompositeState: dimA * dimB must equal the state dimension");
    }
  }

  const DensityOperator& rho() const noexcept { return rho_; }
  std::size_t dimA() const noexcept { return dimA_; }
  std::size_t dimB() const noexcept { return dimB_; }

  // <n a | rho | m b>
  cplx element(std::size_t n, std::size_t a, std::size_t m, std::size_t b) const {
    return rho_(n * dimB_ + a, m * dimB_ + b);
  }

 private:
  DensityOperator rho_;
  std::size_t dimA_;
  std::size_t dimB_;
};

struct Prospect {
  std::size_t n;        // index into the A basis
  ModeWeights weights;  // b_alpha over the B basis
};

enum class ProspectMode { raw, normalized };

inline const char* to_string(ProspectMode m) { return m == ProspectMode::raw ? "raw" : "normalized"; }

struct ProspectResult {
  std::vector<double> p;
  std::vector<double> f;
  std::vector<double> q;
  ProspectMode mode = ProspectMode::raw;
};

inline void require_index(std::size_t i, std::size_t dim, const char* what) {
  if (i >= dim) throw IndexOutOfRange(std::string(what) + ": index " + std::to_string(i) + " out of range");
}

// p(A_n (x) B_alpha) = Tr rho (P_n (x) P_alpha)
inline double joint_probability(const CompositeState& s, std::size_t n, std::size_t alpha) {
  require_index(n, s.dimA(), "joint_probability");
  require_index(alpha, s.dimB(), "joint_probability");
  return clamp_probability(s.element(n, alpha, n, alpha).real(), "joint_probability");
}

inline double standard_union_probability(const CompositeState& s, std::size_t n, std::span<const std::size_t> alphas) {
  require_index(n, s.dimA(), "standard_union_probability");
  require_distinct_indices(alphas, s.dimB(), "standard_union_probability");
  double acc = 0.0;
  for (auto a : alphas) acc += s.element(n, a, n, a).real();
  return clamp_probability(acc, "standard_union_probability");
}

// |pi_n> = |n> (x) |B>
inline Vector prospect_state(const Prospect& pr, std::size_t dimA) {
  require_index(pr.n, dimA, "prospect_state");
  const std::size_t dB = pr.weights.size();
  Vector v(dimA * dB);
  for (std::size_t a = 0; a < dB; ++a) v[pr.n * dB + a] = pr.weights[a];
  return v;
}

inline Matrix prospect_operator(const Prospect& pr, std::size_t dimA) {
  const Vector v = prospect_state(pr, dimA);
  return outer(v, v);
}

inline ProspectResult prospect_probabilities(const CompositeState& s, const ModeWeights& b, ProspectMode mode,
                                             double tol = kDefaultTol) {
  if (b.size() != s.dimB()) throw DimensionMismatch("prospect_probabilities: weight count differs from dimB");
  const std::size_t dA = s.dimA();
  const std::size_t dB = s.dimB();
  ProspectResult r;
  r.mode = mode;
  r.p.resize(dA);
  r.f.resize(dA);
  r.q.resize(dA);
  for (std::size_t n = 0; n < dA; ++n) {
    double f = 0.0;
    cplx q{};
    for (std::size_t a = 0; a < dB; ++a) {
      f += std::norm(b[a]) * s.element(n, a, n, a).real();
      for (std::size_t c = 0; c < dB; ++c) {
        if (c != a) q += std::conj(b[a]) * b[c] * s.element(n, a, n, c);
      }
    }
    if (std::abs(q.imag()) >= tol) {
      throw NumericalError("prospect_probabilities: interference factor has imaginary residue " + std::to_string(q.imag()));
    }
    r.f[n] = f;
    r.q[n] = q.real();
    r.p[n] = f + q.real();
  }
  if (mode == ProspectMode::raw) return r;

  double sum_p = 0.0;
  double sum_f = 0.0;
  for (std::size_t n = 0; n < dA; ++n) {
    sum_p += r.p[n];
    sum_f += r.f[n];
  }
  if (sum_p < 1e-12 || sum_f < 1e-12) {
    throw DegenerateProspect("prospect_probabilities: prospect family has vanishing total probability");
  }
  for (std::size_t n = 0; n < dA; ++n) {
    r.p[n] = clamp_probability(r.p[n] / sum_p, "prospect_probabilities");
    r.f[n] = clamp_probability(r.f[n] / sum_f, "prospect_probabilities");
    r.q[n] = r.p[n] - r.f[n];
  }
  return r;
}

inline CompositeState product_state(const DensityOperator& rhoA, const DensityOperator& rhoB) {
  return CompositeState(DensityOperator(kron(rhoA.matrix(), rhoB.matrix())), rhoA.dim(), rhoB.dim());
}

// |psi> = M^{-1/2} sum_m |mm>
inline Vector max_entangled_vector(std::size_t M) {
  if (M < 2) throw InvalidArgument("max_entangled_state: M must be at least 2");
  Vector v(M * M);
  const double amp = 1.0 / std::sqrt(static_cast<double>(M));
  for (std::size_t m = 0; m < M; ++m) v[m * M + m] = amp;
  return v;
}

// rho = (1/M) sum_{mn} |mm><nn|
inline CompositeState max_entangled_state(std::size_t M) {
  if (M < 2) throw InvalidArgument("max_entangled_state: M must be at least 2");
  Matrix rho(M * M, M * M);
  const double w = 1.0 / static_cast<double>(M);
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t n = 0; n < M; ++n) rho(m * M + m, n * M + n) = w;
  return CompositeState(DensityOperator(std::move(rho)), M, M);
}

// Entanglement production of the maximally entangled state, in bits.
inline double entanglement_measure_maxstate(std::size_t M) {
  if (M < 2) throw InvalidArgument("entanglement_measure_maxstate: M must be at least 2");
  return std::log2(static_cast<double>(M));
}

// Pinching in the B basis: zeroes every <n a|rho|m b> with a != b. This
// removes all elements that feed q and, unlike zeroing only the n = m
// blocks, always leaves a positive operator.
inline Matrix dephase_b(const CompositeState& s) {
  Matrix m = s.rho().matrix();
  const std::size_t dB = s.dimB();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i % dB != j % dB) m(i, j) = 0.0;
  return m;
}

// (1 - lambda) rho_dephased + lambda rho
inline CompositeState partially_decohered(const CompositeState& s, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("partially_decohered: lambda must lie in [0,1]");
  Matrix m = cplx{1.0 - lambda, 0.0} * dephase_b(s) + cplx{lambda, 0.0} * s.rho().matrix();
  return CompositeState(DensityOperator(std::move(m)), s.dimA(), s.dimB());
}

// rho rewritten in the product eigenbasis of (obsA, obsB), so the prospect
// routines above measure those observables.
inline CompositeState to_factor_eigenbases(const CompositeState& s, const Observable& obsA, const Observable& obsB) {
  if (obsA.dim() != s.dimA() || obsB.dim() != s.dimB()) throw DimensionMismatch("to_factor_eigenbases: observable dims");
  const Matrix u = kron(obsA.spectral().basis_matrix(), obsB.spectral().basis_matrix());
  Matrix m = adjoint(u) * s.rho().matrix() * u;
  // Restore exact Hermiticity lost to rounding in the two products.
  const Matrix mh = adjoint(m);
  m += mh;
  m *= 0.5;
  return CompositeState(DensityOperator(std::move(m)), s.dimA(), s.dimB());
}

}  // namespace qprob
