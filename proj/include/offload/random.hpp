#pragma once

#include <cstdint>

namespace offload {

/// Small deterministic generator with a portable stream: identical seeds
/// give identical sequences on every platform and standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [low, high) from the top 53 bits.
  double uniform(double low, double high) {
    const double unit = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return low + (high - low) * unit;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

/// Folds two indices into a base seed; used to give every (parameter, trial)
/// cell of a sweep its own reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  SplitMix64 rng(base ^ (0xD1B54A32D192ED03ull * (a + 1) + 0x8CB92BA72F3D8DD7ull * (b + 1)));
  return rng.next();
}

}  // namespace offload
