#pragma once

// Counter-based random numbers. A draw is a pure function of
// (key, counter), so a path's noise stream does not depend on which worker
// runs it or in what order.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace qprob {

// Philox4x32 with 10 rounds (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

  static Key key_from(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

  static Counter counter_from(std::uint64_t lo, std::uint64_t hi) noexcept {
    return {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32), static_cast<std::uint32_t>(hi),
            static_cast<std::uint32_t>(hi >> 32)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) noexcept {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

namespace detail {

// 53-bit uniform in the open interval (0, 1).
inline double open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

// Two independent standard normals for the block at (seed, stream, index).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  const auto r = Philox4x32::block(Philox4x32::counter_from(index, stream), Philox4x32::key_from(seed));
  const double u1 = detail::open_unit(r[0], r[1]);
  const double u2 = detail::open_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

// Standard normal number `step` of stream `stream`; consecutive steps share a
// Box-Muller block.
inline double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) noexcept {
  return normal_pair(seed, stream, step >> 1)[step & 1];
}

// Sequential engine over one stream, usable with <random> distributions and
// for drawing random test instances. Satisfies UniformRandomBitGenerator.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == 2) {
      block_ = Philox4x32::block(Philox4x32::counter_from(index_++, stream_), Philox4x32::key_from(seed_));
      lane_ = 0;
    }
    const std::size_t i = 2 * lane_++;
    return (std::uint64_t{block_[i]} << 32) | block_[i + 1];
  }

  double uniform() noexcept {
    const auto bits = (*this)();
    return detail::open_unit(static_cast<std::uint32_t>(bits >> 32), static_cast<std::uint32_t>(bits));
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
  Philox4x32::Counter block_{};
  std::size_t lane_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qprob
