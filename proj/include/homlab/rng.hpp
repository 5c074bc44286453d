#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "homlab/errors.hpp"

namespace homlab {

// Seeding helper; advances the state and returns a scrambled word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ generator. Used instead of the std engines/distributions so
// that streams are reproducible bit-for-bit across standard libraries.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(const std::array<std::uint64_t, 4>& state) : s_(state) {}

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> s_;
};

// One independent random stream, addressed by (seed, stream id). Streams with
// different ids are statistically independent, so parallel workers can each
// own one without coordination.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(derive_state(seed, stream_id)) {}

  // [0, 1), 53-bit resolution
  double uniform01() {
    return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; the spare is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Exponential with unit mean.
  double exponential() { return -std::log(1.0 - uniform01()); }

  // Exact Poisson sampling by counting unit-exponential arrivals. Falls back
  // to a rounded normal above 1e6 where the relative error is ~1e-3 sigma.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw ValidationError("poisson: mean must be finite and non-negative");
    if (mean == 0.0) return 0;
    if (mean > 1e6) {
      const double n = std::round(mean + std::sqrt(mean) * normal());
      return n < 0.0 ? 0 : static_cast<std::uint64_t>(n);
    }
    std::uint64_t n = 0;
    double acc = exponential();
    while (acc <= mean) {
      ++n;
      acc += exponential();
    }
    return n;
  }

  std::uint64_t next_u64() { return engine_.next(); }

 private:
  static std::array<std::uint64_t, 4> derive_state(std::uint64_t seed,
                                                   std::uint64_t stream_id) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
    std::array<std::uint64_t, 4> s{};
    bool nonzero = false;
    for (auto& v : s) {
      v = splitmix64(x);
      nonzero |= (v != 0);
    }
    if (!nonzero) s[0] = 1;
    return s;
  }

  Xoshiro256pp engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace homlab
