#pragma once

// Two-mode Bose condensate: population imbalance s and phase difference x
//
//   ds = -b sqrt(1 - s^2) sin x dt
//   dx = s (1 + b cos x / sqrt(1 - s^2)) dt + sigma dW
//
// integrated deterministically (RK4) and with phase noise, plus the ensemble
// estimate of the mode interference factor q_n(t) = p_n(t) - f_n(t).
//
// s = +-1 is only a pole of the (s, x) chart, and noisy paths do reach it.
// The integrator therefore works with the unit vector
// r = (sqrt(1 - s^2) cos x, sqrt(1 - s^2) sin x, s), on which the flow is
// dr/dt = grad H x r with H = s^2/2 - b r_1 (smooth everywhere) and the phase
// kick is a rotation about the third axis.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qprob/error.hpp"
#include "qprob/random.hpp"

namespace qprob::bec {

struct BecParams {
  double b = 0.25;
  double sigma = 0.1;
  double s0 = -0.9;
  double x0 = 0.0;
  double dt = 1e-3;
  double tMax = 100.0;
  std::uint64_t nPaths = 2000;
  std::uint64_t seed = 20240601;

  void validate() const {
    if (!(std::abs(s0) < 1.0)) throw InvalidArgument("BecParams: |s0| must be below 1");
    if (!(dt > 0.0)) throw InvalidArgument("BecParams: dt must be positive");
    if (!(tMax > dt)) throw InvalidArgument("BecParams: tMax must exceed dt");
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("BecParams: b must be non-negative");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("BecParams: sigma must be non-negative");
    if (!std::isfinite(x0)) throw InvalidArgument("BecParams: x0 must be finite");
    if (nPaths == 0) throw InvalidArgument("BecParams: nPaths must be positive");
  }

  // floor(tMax / dt), tolerant of tMax/dt landing a few ulps below an integer.
  std::uint64_t steps() const {
    const double ratio = tMax / dt;
    const double nearest = std::round(ratio);
    return static_cast<std::uint64_t>(std::abs(ratio - nearest) <= 1e-9 * nearest ? nearest : std::floor(ratio));
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> s;
  std::vector<double> x;
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> p1, p2;
  std::vector<double> f1, f2;
  std::vector<double> q1, q2;
  std::vector<double> stdErr1;  // standard error of p1
  std::uint64_t nPaths = 0;
};

enum class Regime { Rabi, Josephson, Critical };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Rabi: return "Rabi";
    case Regime::Josephson: return "Josephson";
    case Regime::Critical: return "Critical";
  }
  return "?";
}

// Stream index used for the deterministic trajectory in error reports.
inline constexpr std::uint64_t kDeterministicPath = std::numeric_limits<std::uint64_t>::max();

// b_c = s0^2 / (2 (1 + sqrt(1 - s0^2) cos x0))
inline double critical_amplitude(double s0, double x0, double tol = 1e-12) {
  if (!(std::abs(s0) <= 1.0)) throw InvalidArgument("critical_amplitude: |s0| must not exceed 1");
  const double denom = 1.0 + std::sqrt(1.0 - s0 * s0) * std::cos(x0);
  if (denom <= tol) throw DenominatorVanishes("critical_amplitude: 1 + sqrt(1 - s0^2) cos x0 vanishes");
  return s0 * s0 / (2.0 * denom);
}

inline Regime regime_classify(double b, double s0, double x0, double tol = 1e-9) {
  const double bc = critical_amplitude(s0, x0);
  if (b < bc - tol) return Regime::Rabi;
  if (b > bc + tol) return Regime::Josephson;
  return Regime::Critical;
}

// Conserved along the noiseless flow: ds/dt = -dH/dx, dx/dt = dH/ds.
inline double energy(double s, double x, double b) { return 0.5 * s * s - b * std::sqrt(1.0 - s * s) * std::cos(x); }

namespace detail {

// Bloch vector (u, v, s).
struct State {
  double u;
  double v;
  double s;
};

inline State from_angles(double s, double x) {
  const double rho = std::sqrt(std::max(0.0, 1.0 - s * s));
  return {rho * std::cos(x), rho * std::sin(x), s};
}

inline State drift(const State& r, double b) { return {-r.s * r.v, r.s * (r.u + b), -b * r.v}; }

inline State rk4_step(const State& y, double b, double dt) {
  auto at = [&](const State& k, double h) { return State{y.u + h * k.u, y.v + h * k.v, y.s + h * k.s}; };
  const State k1 = drift(y, b);
  const State k2 = drift(at(k1, 0.5 * dt), b);
  const State k3 = drift(at(k2, 0.5 * dt), b);
  const State k4 = drift(at(k3, dt), b);
  const double w = dt / 6.0;
  State out{y.u + w * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u), y.v + w * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            y.s + w * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s)};
  // Back onto the sphere; both the flow and the kicks preserve |r| = 1.
  const double n = std::sqrt(out.u * out.u + out.v * out.v + out.s * out.s);
  return {out.u / n, out.v / n, out.s / n};
}

inline State rotate_phase(const State& r, double c, double sn) { return {c * r.u - sn * r.v, sn * r.u + c * r.v, r.s}; }

// Visits every stride-th sample (t = k dt) of one path. With sigma > 0 each
// step is a symmetric splitting: rotate the phase by half the Wiener
// increment, an RK4 drift step, the other half. At sigma = 0 this is exactly
// the RK4 step.
template <class Visit>
void walk_path(const BecParams& p, std::uint64_t path, std::uint64_t stride, Visit&& visit) {
  const std::uint64_t n = p.steps();
  const double half_kick = 0.5 * p.sigma * std::sqrt(p.dt);
  const bool noisy = p.sigma > 0.0;
  State y = from_angles(p.s0, p.x0);
  visit(std::uint64_t{0}, y);
  std::array<double, 2> pair{};
  for (std::uint64_t k = 0; k < n; ++k) {
    double c = 1.0, sn = 0.0;
    if (noisy) {
      if ((k & 1) == 0) pair = normal_pair(p.seed, path, k >> 1);
      const double kick = half_kick * pair[k & 1];
      c = std::cos(kick);
      sn = std::sin(kick);
      y = rotate_phase(y, c, sn);
    }
    y = rk4_step(y, p.b, p.dt);
    if (noisy) y = rotate_phase(y, c, sn);
    if (!std::isfinite(y.s)) throw StepRejected(path, k + 1, y.s);
    if ((k + 1) % stride == 0) visit(k + 1, y);
  }
}

// s and the continuous (unwrapped) phase at every stride-th step.
inline Trajectory record(const BecParams& p, std::uint64_t path, std::uint64_t stride) {
  p.validate();
  if (stride == 0) throw InvalidArgument("stride must be positive");
  Trajectory tr;
  const std::size_t rows = p.steps() / stride + 1;
  tr.times.reserve(rows);
  tr.s.reserve(rows);
  tr.x.reserve(rows);
  double x = p.x0;
  walk_path(p, path, 1, [&](std::uint64_t k, const State& y) {
    if (k > 0 && (y.u != 0.0 || y.v != 0.0)) x += std::remainder(std::atan2(y.v, y.u) - x, 2.0 * std::numbers::pi);
    if (k % stride != 0) return;
    tr.times.push_back(static_cast<double>(k) * p.dt);
    tr.s.push_back(y.s);
    tr.x.push_back(x);
  });
  return tr;
}

}  // namespace detail

// Noiseless RK4 solution (sigma is ignored).
inline Trajectory integrate_deterministic(const BecParams& p, std::uint64_t stride = 1) {
  BecParams quiet = p;
  quiet.sigma = 0.0;
  return detail::record(quiet, kDeterministicPath, stride);
}

// One noisy path. The Wiener increments come from the counter-based stream
// keyed by (seed, pathIndex, step), so the result does not depend on when or
// where the path is computed.
inline Trajectory integrate_sde(const BecParams& p, std::uint64_t pathIndex, std::uint64_t stride = 1) {
  return detail::record(p, pathIndex, stride);
}

// Per-path interference factor of mode 1, (1 - s_path)/2 - f1.
inline std::vector<double> path_interference(const BecParams& p, std::uint64_t pathIndex, std::uint64_t stride = 1) {
  const auto det = integrate_deterministic(p, stride);
  const auto noisy = integrate_sde(p, pathIndex, stride);
  std::vector<double> q(det.s.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 0.5 * (1.0 - noisy.s[i]) - 0.5 * (1.0 - det.s[i]);
  return q;
}

// Worker count from QPROB_THREADS, else the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("QPROB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw InvalidArgument("QPROB_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct EnsembleOptions {
  std::uint64_t stride = 1;
  unsigned workers = 0;  // 0: default_workers()
};

// Paths per reduction block. Blocks are summed internally in path order and
// then combined in block order, so the floating-point result is the same for
// every worker count.
inline constexpr std::uint64_t kPathsPerBlock = 64;

inline EnsembleResult ensemble_interference(const BecParams& p, const EnsembleOptions& opt = {}) {
  p.validate();
  if (p.nPaths < 2) throw InvalidArgument("ensemble_interference: nPaths must be at least 2");
  if (opt.stride == 0) throw InvalidArgument("ensemble_interference: stride must be positive");

  const Trajectory det = integrate_deterministic(p, opt.stride);
  const std::size_t rows = det.s.size();
  const std::uint64_t blocks = (p.nPaths + kPathsPerBlock - 1) / kPathsPerBlock;

  // Deviations s_path - s_det are accumulated, so sigma = 0 gives p_n = f_n
  // exactly.
  std::vector<std::vector<double>> dev_sum(blocks), dev_sq(blocks);
  std::vector<std::exception_ptr> failure(blocks);
  std::atomic<std::uint64_t> next{0};

  auto work = [&] {
    for (std::uint64_t blk = next++; blk < blocks; blk = next++) {
      auto& sum = dev_sum[blk];
      auto& sq = dev_sq[blk];
      sum.assign(rows, 0.0);
      sq.assign(rows, 0.0);
      const std::uint64_t first = blk * kPathsPerBlock;
      const std::uint64_t last = std::min(p.nPaths, first + kPathsPerBlock);
      for (std::uint64_t path = first; path < last; ++path) {
        try {
          std::size_t row = 0;
          detail::walk_path(p, path, opt.stride, [&](std::uint64_t, const detail::State& y) {
            const double d = y.s - det.s[row];
            sum[row] += d;
            sq[row] += d * d;
            ++row;
          });
        } catch (...) {
          failure[blk] = std::current_exception();
          break;
        }
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(opt.workers == 0 ? default_workers() : opt.workers, blocks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::uint64_t blk = 0; blk < blocks; ++blk) {
    if (failure[blk]) std::rethrow_exception(failure[blk]);
  }

  EnsembleResult r;
  r.nPaths = p.nPaths;
  r.times = det.times;
  r.p1.resize(rows);
  r.p2.resize(rows);
  r.f1.resize(rows);
  r.f2.resize(rows);
  r.q1.resize(rows);
  r.q2.resize(rows);
  r.stdErr1.resize(rows);
  const double n = static_cast<double>(p.nPaths);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    double sq = 0.0;
    for (std::uint64_t blk = 0; blk < blocks; ++blk) {
      sum += dev_sum[blk][i];
      sq += dev_sq[blk][i];
    }
    const double mean_dev = sum / n;
    const double mean_s = det.s[i] + mean_dev;
    r.f1[i] = 0.5 * (1.0 - det.s[i]);
    r.f2[i] = 0.5 * (1.0 + det.s[i]);
    r.p1[i] = 0.5 * (1.0 - mean_s);
    r.p2[i] = 0.5 * (1.0 + mean_s);
    r.q1[i] = r.p1[i] - r.f1[i];
    r.q2[i] = r.p2[i] - r.f2[i];
    const double var_s = std::max(0.0, (sq - sum * mean_dev) / (n - 1.0));
    r.stdErr1[i] = 0.5 * std::sqrt(var_s / n);
  }
  return r;
}

// Population variance of v over samples with times[i] <= t_max.
inline double time_variance(const std::vector<double>& times, const std::vector<double>& v,
                            double t_max = std::numeric_limits<double>::infinity()) {
  double sum = 0.0;
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < v.size() && times[i] <= t_max; ++i, ++count) sum += v[i];
  if (count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) sq += (v[i] - mean) * (v[i] - mean);
  return sq / static_cast<double>(count);
}

// max |v| over samples with times[i] <= t_max, and the index where it occurs.
inline std::pair<double, std::size_t> max_abs_until(const std::vector<double>& times, const std::vector<double>& v,
                                                    double t_max) {
  double best = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < v.size() && times[i] <= t_max; ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      at = i;
    }
  }
  return {best, at};
}

}  // namespace qprob::bec
