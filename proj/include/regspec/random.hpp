#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace regspec {

/// Seeded generator with a fully specified variate stream.
///
/// Uniforms come from the top 53 bits of std::mt19937_64 (whose output
/// sequence is fixed by the standard); Gaussians use the Box-Muller transform
/// on pairs of those uniforms. Unlike std::normal_distribution, the stream is
/// therefore identical across standard libraries.
///
/// Not thread-safe. Give each thread its own instance via `derive_seed`.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gaussian() {
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

  /// Complex circular Gaussian with E|z|^2 = 1 (real and imaginary parts
  /// independent with variance 1/2 each).
  std::complex<double> circular_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }

  /// SplitMix64 mix of (master, stream): decorrelated per-stream seeds.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace regspec
