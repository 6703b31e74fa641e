#pragma once

#include <cstdint>

namespace badmm {

/// SplitMix64: a counter-based 64-bit generator. Output i is a fixed mixing
/// function of seed + (i + 1) * golden ratio, so streams are identical on
/// every platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // 53 random bits scaled into [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Independent stream for (seed, tag).
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t tag) { return SplitMix64(mix(seed ^ mix(tag))); }

 private:
  std::uint64_t state_;
};

}  // namespace badmm
