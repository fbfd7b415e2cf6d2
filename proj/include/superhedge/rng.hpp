#pragma once

#include <cstdint>

namespace superhedge {

/// Counter-based generator: draw i of stream s under seed k is
/// splitmix64(key(k, s) + i * 0x9E3779B97F4A7C15), so any draw can be
/// recomputed without replaying the stream and streams never share state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0xD1B54A32D192ED03ULL))) {}

  std::uint64_t next() { return mix(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL); }
  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace superhedge
