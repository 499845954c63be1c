#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace rieszcap {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace detail

/// Random stream keyed by (seed, stream id).
///
/// The engine is xoshiro256++ whose 256-bit state is derived from the key by
/// SplitMix64, so constructing a stream costs a handful of integer ops. Every
/// simulated path gets its own stream (stream id = path index), which makes
/// batch results independent of how paths are distributed across workers.
/// Satisfies UniformRandomBitGenerator, so <random> distributions accept it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::uint64_t key = seed;
    std::uint64_t mixed = detail::splitmix64(key);
    std::uint64_t sm = mixed ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL);
    // Burn one output so nearby stream ids do not share a prefix.
    detail::splitmix64(sm);
    for (auto& w : s_) w = detail::splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // (0, 1), safe for log()
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() { return normal_(*this); }

  double exponential() { return -std::log(uniform_open()); }

  double gamma(double shape) {
    return gamma_(*this, std::gamma_distribution<double>::param_type(shape, 1.0));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t s_[4]{};
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::gamma_distribution<double> gamma_{1.0, 1.0};
};

}  // namespace rieszcap
