#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <tuple>
#include <utility>

#include "qprob/error.hpp"

namespace qprob {

// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1], found by
// Newton iteration on P_N from the Chebyshev initial guesses.
template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendreRule() {
    const std::size_t half = (N + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
      double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (std::size_t k = 1; k <= N; ++k) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
        }
        dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = -z;
      nodes[N - 1 - i] = z;
      weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

namespace detail {

inline const GaussLegendreRule<15>& gl15() {
  static const GaussLegendreRule<15> rule;
  return rule;
}

template <class F>
double gauss_legendre_panel(F& f, double a, double b) {
  const auto& rule = gl15();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

struct Panel {
  double a, b;
  double value;  // two-panel estimate
  double error;  // |two-panel - one-panel|

  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel make_panel(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double whole = gauss_legendre_panel(f, a, b);
  const double refined = gauss_legendre_panel(f, a, mid) + gauss_legendre_panel(f, mid, b);
  return {a, b, refined, std::abs(refined - whole)};
}

}  // namespace detail

// Globally adaptive 15-point Gauss-Legendre on [a, b]: the panel with the
// largest error estimate is bisected until the summed estimate is below tol
// (or 1e-15 relative). Integrable endpoint singularities converge, slowly.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol, std::size_t max_panels = 20000) {
  if (!(tol > 0.0)) throw InvalidArgument("integrate_adaptive: tolerance must be positive");
  if (a == b) return 0.0;
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::make_panel(f, a, b));
  auto totals = [&heap] {
    auto copy = heap;
    double v = 0.0, e = 0.0;
    for (; !copy.empty(); copy.pop()) {
      v += copy.top().value;
      e += copy.top().error;
    }
    return std::pair{v, e};
  };
  double value = heap.top().value;
  double error = heap.top().error;
  for (;;) {
    if (error <= std::max(tol, 1e-15 * std::abs(value))) {
      std::tie(value, error) = totals();  // drop accumulated rounding before deciding
      if (error <= std::max(tol, 1e-15 * std::abs(value))) return value;
    }
    if (heap.size() >= max_panels) throw NoConvergence("adaptive quadrature: panel budget exhausted");
    const detail::Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) throw NoConvergence("adaptive quadrature: panel width underflow");
    heap.pop();
    const auto left = detail::make_panel(f, worst.a, mid);
    const auto right = detail::make_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
}

}  // namespace qprob
