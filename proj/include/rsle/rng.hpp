#pragma once

// Counter-based, splittable random numbers.
//
// Every variate is a pure function of (seed, stream, counter), so replicas
// can be generated in parallel and replayed bit-identically in any order.
// The mixing function is the SplitMix64 finalizer, applied twice with
// golden-ratio increments between the key and the counter.

#include <cmath>
#include <cstdint>

#include "rsle/params.hpp"

namespace rsle {

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + kGamma) ^ (stream * kGamma2 + 1))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + counter * kGamma);
  }

  /// Uniform on (0, 1] (never 0, safe under log).
  double uniform(std::uint64_t counter) const {
    return ((bits(counter) >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; one variate per counter value.
  double normal(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kGamma2 = 0xD1B54A32D192ED03ULL;
  std::uint64_t key_;
};

/// Replayable Brownian driving: unit normals indexed by step, scaled by the
/// caller's sqrt(dt) for the step actually taken.
struct DrivingPath {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;

  double unit_normal(std::uint64_t step) const {
    return CounterRng(seed, replica).normal(step);
  }
  double increment(std::uint64_t step, double dt) const {
    return std::sqrt(dt) * unit_normal(step);
  }
};

/// Zero driving, for deterministic-flow oracles.
struct ZeroDriving {
  double unit_normal(std::uint64_t) const { return 0.0; }
  double increment(std::uint64_t, double) const { return 0.0; }
};

}  // namespace rsle
