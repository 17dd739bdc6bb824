#pragma once

#include <cstdint>
#include <random>

namespace lyapfun {

/// Seedable random stream with a counter-based substream split:
/// substream(seed, i) and substream(seed, j) are independent for i != j,
/// so samples can be generated in any order (or in parallel) while
/// staying reproducible for a fixed master seed.
///
/// Normal variates are produced by Box-Muller from the raw engine bits
/// rather than std::normal_distribution, which keeps the output
/// identical across standard library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix(seed)) {}

  static RngStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RngStream(master_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in (0,1].
  double next_uniform() {
    const std::uint64_t bits = engine_() >> 11;  // 53 bits
    return (static_cast<double>(bits) + 1.0) * 0x1p-53;
  }

  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds before they reach
  // the engine.
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lyapfun
