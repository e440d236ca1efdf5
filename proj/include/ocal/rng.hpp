#pragma once

#include <cstdint>
#include <random>

namespace ocal {

/// Seedable 64-bit generator (mt19937_64) with named substreams.
///
/// Each substream is keyed by (seed, stream id) through a SplitMix64 mix so
/// that streams are independent and the draws of one stream do not depend on
/// how many values other streams consumed. Uniform doubles are built from the
/// raw 64-bit output rather than std::uniform_real_distribution, whose output
/// differs between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// -1 or +1 with equal probability.
  int sign() { return (engine_() >> 63) != 0 ? 1 : -1; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ocal
