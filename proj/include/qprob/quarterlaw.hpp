#pragma once

// Distribution of the interference factor q on [-1, 1] as a two-branch beta
// family, and the expected positive/negative parts q+ and q-.
//
//   phi(q) = lambda+ / B(alpha, beta) * q^(alpha-1) (1-q)^(beta-1)     0 <= q <= 1
//   phi(q) = lambda- / B(mu, nu)      * |q|^(mu-1) (1-|q|)^(nu-1)     -1 <= q <= 0

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "qprob/error.hpp"
#include "qprob/quadrature.hpp"

namespace qprob {

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }
inline double beta_function(double a, double b) { return std::exp(log_beta(a, b)); }

class BetaPairDistribution {
 public:
  BetaPairDistribution(double alpha, double beta, double mu, double nu, double lambdaPlus, double lambdaMinus,
                       double tol = 1e-12)
      : alpha_(alpha), beta_(beta), mu_(mu), nu_(nu), lambdaPlus_(lambdaPlus), lambdaMinus_(lambdaMinus) {
    for (double s : {alpha, beta, mu, nu}) {
      if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("BetaPairDistribution: shape parameters must be positive");
    }
    for (double l : {lambdaPlus, lambdaMinus}) {
      if (!(l >= 0.0 && l <= 1.0)) throw InvalidArgument("BetaPairDistribution: branch weights must lie in [0,1]");
    }
    if (std::abs(lambdaPlus + lambdaMinus - 1.0) > tol) {
      throw InvalidArgument("BetaPairDistribution: lambda+ + lambda- must equal 1");
    }
  }

  static BetaPairDistribution uniform() { return {1.0, 1.0, 1.0, 1.0, 0.5, 0.5}; }

  // lambda+ = lambda- = 1/2, alpha = beta, mu = nu.
  static BetaPairDistribution symmetric(double alpha, double mu) { return {alpha, alpha, mu, mu, 0.5, 0.5}; }

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double mu() const noexcept { return mu_; }
  double nu() const noexcept { return nu_; }
  double lambdaPlus() const noexcept { return lambdaPlus_; }
  double lambdaMinus() const noexcept { return lambdaMinus_; }

 private:
  double alpha_, beta_, mu_, nu_, lambdaPlus_, lambdaMinus_;
};

struct QSplit {
  double qPlus;   // >= 0
  double qMinus;  // <= 0
};

// Distance from the singular endpoints at which the density is evaluated
// when a shape parameter is below one.
inline constexpr double kPdfEndpointCap = 1e-15;

namespace detail {

inline double beta_branch(double x, double a, double b) {
  if (a < 1.0) x = std::max(x, kPdfEndpointCap);
  if (b < 1.0) x = std::min(x, 1.0 - kPdfEndpointCap);
  double log_density = -log_beta(a, b);
  if (a != 1.0) log_density += (a - 1.0) * std::log(x);
  if (b != 1.0) log_density += (b - 1.0) * std::log1p(-x);
  return std::exp(log_density);
}

// int_0^{1/2} x^(a-1) (1-x)^(b-1) dx. For a < 1 the endpoint singularity is
// removed with u = x^a, giving (1/a) int_0^{2^-a} (1 - u^(1/a))^(b-1) du.
inline double half_beta_kernel(double a, double b, double tol) {
  if (a < 1.0) {
    const double inv = 1.0 / a;
    auto g = [&](double u) { return inv * std::pow(1.0 - std::pow(u, inv), b - 1.0); };
    return integrate_adaptive(g, 0.0, std::pow(0.5, a), tol);
  }
  auto g = [&](double x) { return std::pow(x, a - 1.0) * std::pow(1.0 - x, b - 1.0); };
  return integrate_adaptive(g, 0.0, 0.5, tol);
}

// int_0^1 x^(a-1) (1-x)^(b-1) dx, split at 1/2 so each half has at most one
// singular endpoint.
inline double beta_kernel(double a, double b, double tol) {
  return half_beta_kernel(a, b, 0.5 * tol) + half_beta_kernel(b, a, 0.5 * tol);
}

}  // namespace detail

// Density at q; at q = 0 (and q = +-1) a branch with shape < 1 is evaluated
// kPdfEndpointCap away from the singular endpoint. q = 0 uses the right branch.
inline double pdf(const BetaPairDistribution& d, double q) {
  if (!(std::abs(q) <= 1.0)) throw InvalidArgument("pdf: |q| must not exceed 1");
  if (q >= 0.0) return d.lambdaPlus() * detail::beta_branch(q, d.alpha(), d.beta());
  return d.lambdaMinus() * detail::beta_branch(-q, d.mu(), d.nu());
}

inline QSplit q_split_closed(const BetaPairDistribution& d) {
  return {d.alpha() * d.lambdaPlus() / (d.alpha() + d.beta()), -(d.mu() * d.lambdaMinus() / (d.mu() + d.nu()))};
}

// q+ = int_0^1 q phi dq and q- = int_{-1}^0 q phi dq by quadrature.
inline QSplit q_split_numeric(const BetaPairDistribution& d, double tol = 1e-10) {
  const double inner_tol = 0.1 * tol;
  const double plus = d.lambdaPlus() * detail::beta_kernel(d.alpha() + 1.0, d.beta(), inner_tol) / beta_function(d.alpha(), d.beta());
  const double minus = d.lambdaMinus() * detail::beta_kernel(d.mu() + 1.0, d.nu(), inner_tol) / beta_function(d.mu(), d.nu());
  return {plus, -minus};
}

// int_{-1}^1 phi dq by quadrature.
inline double pdf_integral(const BetaPairDistribution& d, double tol = 1e-10) {
  const double inner_tol = 0.1 * tol;
  return d.lambdaPlus() * detail::beta_kernel(d.alpha(), d.beta(), inner_tol) / beta_function(d.alpha(), d.beta()) +
         d.lambdaMinus() * detail::beta_kernel(d.mu(), d.nu(), inner_tol) / beta_function(d.mu(), d.nu());
}

// q+ + q-, zero when the mean of q vanishes.
inline double zero_mean_residual(const BetaPairDistribution& d) {
  const auto s = q_split_closed(d);
  return s.qPlus + s.qMinus;
}

struct BalanceResult {
  std::optional<BetaPairDistribution> distribution;
  double residual;  // alpha lambda+ / (alpha+beta) - mu lambda- / (mu+nu)

  bool feasible() const noexcept { return distribution.has_value(); }
};

// Completes (alpha, beta, lambda+, mu, nu) with lambda- = 1 - lambda+ when the
// resulting distribution has zero mean within tol.
inline BalanceResult solve_balanced(double alpha, double beta, double lambdaPlus, double mu, double nu,
                                    double tol = 1e-10) {
  if (!(lambdaPlus > 0.0 && lambdaPlus < 1.0)) throw InvalidArgument("solve_balanced: lambda+ must lie in (0,1)");
  BetaPairDistribution d(alpha, beta, mu, nu, lambdaPlus, 1.0 - lambdaPlus);
  const double residual = zero_mean_residual(d);
  if (std::abs(residual) <= tol) return {d, residual};
  return {std::nullopt, residual};
}

}  // namespace qprob
