#pragma once

#include <cmath>
#include <cstdint>

namespace suno {

// SplitMix64 (Steele/Lea/Flood 2014). Chosen as the project-wide generator
// because its output is a pure function of the 64-bit state, making every
// stream reproducible across platforms from a (seed, tag...) tuple alone.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in [-1, 1).
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }

  // Unbiased integer in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  void gaussian_pair(double &g0, double &g1) {
    const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    g0 = r * std::cos(two_pi * u2);
    g1 = r * std::sin(two_pi * u2);
  }

private:
  std::uint64_t state_;
};

// Derives an independent substream seed from a base seed and tag words by
// chaining SplitMix64 steps. Used everywhere a module needs its own stream
// (per-scan jitter, per-scan noise, per-mask sampling) so streams never
// alias across purposes.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0,
                                 std::uint64_t tag_c = 0) {
  SplitMix64 a(seed ^ 0xA3C59AC2ULL);
  std::uint64_t s = a.next();
  s = SplitMix64(s ^ tag_a).next();
  s = SplitMix64(s ^ tag_b).next();
  s = SplitMix64(s ^ tag_c).next();
  return s;
}

} // namespace suno
