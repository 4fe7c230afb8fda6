#pragma once

// Distances between non-negative power spectra sampled on the uniform grid
// m / M. Integrals over [0, 1) use the rectangle rule, so every distance is
// intensive (independent of M for smooth spectra).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"

namespace regspec {

/// Non-negative power values on nu_m = m / M.
class PowerSpectrumGrid {
 public:
  explicit PowerSpectrumGrid(RealVector values) : values_(std::move(values)) {
    detail::require_arg(!values_.empty(), "power spectrum needs at least one grid point");
    for (double v : values_)
      detail::require_arg(std::isfinite(v) && v >= 0.0, "power spectrum values must be finite and non-negative");
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t m) const { return values_[m]; }
  double frequency(std::size_t m) const { return static_cast<double>(m) / static_cast<double>(values_.size()); }
  double max() const { return *std::max_element(values_.begin(), values_.end()); }

 private:
  RealVector values_;
};

namespace detail {

inline void require_same_grid(const PowerSpectrumGrid& s1, const PowerSpectrumGrid& s2) {
  require_arg(s1.size() == s2.size(), "spectra live on different grids");
}

inline void require_floor(double floor) {
  require_arg(std::isfinite(floor) && floor > 0.0, "spectral floor must be positive");
}

}  // namespace detail

inline double dist_l1(const PowerSpectrumGrid& s1, const PowerSpectrumGrid& s2) {
  detail::require_same_grid(s1, s2);
  double total = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) total += std::abs(s1[m] - s2[m]);
  return total / static_cast<double>(s1.size());
}

inline double dist_l2(const PowerSpectrumGrid& s1, const PowerSpectrumGrid& s2) {
  detail::require_same_grid(s1, s2);
  double total = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) total += (s1[m] - s2[m]) * (s1[m] - s2[m]);
  return std::sqrt(total / static_cast<double>(s1.size()));
}

/// Itakura-Saito divergence int (r - log r - 1) with r = s1 / s2, both
/// spectra clipped from below at `floor`.
inline double dist_isd(const PowerSpectrumGrid& s1, const PowerSpectrumGrid& s2, double floor) {
  detail::require_same_grid(s1, s2);
  detail::require_floor(floor);
  double total = 0.0;
  for (std::size_t m = 0; m < s1.size(); ++m) {
    const double r = std::max(s1[m], floor) / std::max(s2[m], floor);
    total += r - std::log(r) - 1.0;
  }
  return total / static_cast<double>(s1.size());
}

/// isd(s1, s2) + isd(s2, s1); not halved.
inline double dist_sis(const PowerSpectrumGrid& s1, const PowerSpectrumGrid& s2, double floor) {
  return dist_isd(s1, s2, floor) + dist_isd(s2, s1, floor);
}

/// 1e-12 * max(reference).
inline double default_floor(const PowerSpectrumGrid& reference) {
  const double peak = reference.max();
  return peak > 0.0 ? 1e-12 * peak : 1e-300;
}

/// Total variation int |dS/dnu| on the circle.
inline double roughness(const PowerSpectrumGrid& s) {
  double total = 0.0;
  for (std::size_t m = 0; m < s.size(); ++m) total += std::abs(s[(m + 1) % s.size()] - s[m]);
  return total;
}

}  // namespace regspec
