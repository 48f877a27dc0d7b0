#pragma once

// Random instances for property checks: pure states from normalized complex
// Gaussian vectors, mixed states as convex mixtures of d pure states.

#include <cstddef>
#include <vector>

#include "qprob/events.hpp"
#include "qprob/linalg.hpp"
#include "qprob/prospects.hpp"
#include "qprob/random.hpp"
#include "qprob/uncertain.hpp"

namespace qprob {

inline Vector random_unit_vector(CounterEngine& rng, std::size_t d) {
  std::vector<cplx> v(d);
  double n2 = 0.0;
  for (auto& z : v) {
    z = {rng.normal(), rng.normal()};
    n2 += std::norm(z);
  }
  const double inv = 1.0 / std::sqrt(n2);
  for (auto& z : v) z *= inv;
  return Vector(std::move(v));
}

inline Matrix random_matrix(CounterEngine& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = {rng.normal(), rng.normal()};
  return m;
}

inline Matrix random_hermitian(CounterEngine& rng, std::size_t d) {
  const Matrix g = random_matrix(rng, d, d);
  Matrix h = g + adjoint(g);
  h *= 0.5;
  for (std::size_t i = 0; i < d; ++i) h(i, i) = h(i, i).real();
  return h;
}

inline DensityOperator random_pure_state(CounterEngine& rng, std::size_t d) {
  return DensityOperator::pure(random_unit_vector(rng, d));
}

inline DensityOperator random_mixed_state(CounterEngine& rng, std::size_t d) {
  std::vector<double> w(d);
  double total = 0.0;
  for (auto& x : w) total += (x = rng.uniform());
  Matrix m(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    const Vector v = random_unit_vector(rng, d);
    m += cplx{w[k] / total, 0.0} * outer(v, v);
  }
  // Rounding can leave the trace a few ulps off; rescale.
  m *= 1.0 / trace(m).real();
  for (std::size_t i = 0; i < d; ++i) m(i, i) = m(i, i).real();
  return DensityOperator(std::move(m));
}

inline Observable random_observable(CounterEngine& rng, std::size_t d) {
  return Observable::from_matrix(random_hermitian(rng, d));
}

inline ModeWeights random_weights(CounterEngine& rng, std::size_t d) {
  const Vector v = random_unit_vector(rng, d);
  return ModeWeights::normalized(std::vector<cplx>(v.begin(), v.end()));
}

// Generic pure state on C^dA (x) C^dB; entangled with probability one.
inline CompositeState random_entangled_state(CounterEngine& rng, std::size_t dA, std::size_t dB) {
  return CompositeState(random_pure_state(rng, dA * dB), dA, dB);
}

}  // namespace qprob
