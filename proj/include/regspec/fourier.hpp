#pragma once

// Fourier operators between time samples and frequency amplitudes.
//
// Normalization, used by every other header:
//   F_P[p, q]  = P^{-1/2} exp(-2i pi p q / P)      (unitary, symmetric)
//   W_NP[n, p] = P^{-1/2} exp(+2i pi p n / P),  n < N <= P
// so W_NP holds the first N rows of F_P^dagger, W_NP F_P = [I_N 0] and
// W_NP^dagger y = F_P (y zero-padded to P).
// The continuous-frequency adjoint carries no P^{-1/2}:
//   (W_N^dagger z)(nu) = sum_n z_n exp(-2i pi nu n).
//
// Frequency grids are half-open, nu in [0, 1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/parallel.hpp"

namespace regspec {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// N >= 1 observed complex samples y_0 .. y_{N-1}.
class TimeSeries {
 public:
  explicit TimeSeries(ComplexVector samples) : samples_(std::move(samples)) {
    detail::require(!samples_.empty(), ErrorCode::invalid_input, "time series must hold at least one sample");
    for (const auto& s : samples_)
      detail::require(is_finite(s), ErrorCode::invalid_input, "time series samples must be finite");
  }

  std::size_t size() const { return samples_.size(); }
  std::span<const Complex> samples() const { return samples_; }
  const Complex& operator[](std::size_t n) const { return samples_[n]; }

  double energy() const {
    double total = 0.0;
    for (const auto& s : samples_) total += std::norm(s);
    return total;
  }

 private:
  ComplexVector samples_;
};

/// Amplitudes a_p on the discrete grid nu_p = p / P.
struct SpectrumDF {
  ComplexVector amps;

  std::size_t grid_size() const { return amps.size(); }
  double frequency(std::size_t p) const {
    return static_cast<double>(p) / static_cast<double>(amps.size());
  }
};

/// Samples of a continuous-frequency amplitude a(nu) on an arbitrary grid.
struct SpectrumCF {
  RealVector grid;
  ComplexVector values;
};

/// Throws unless `grid` is strictly increasing inside [0, 1).
inline void validate_grid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    detail::require_arg(grid[i] >= 0.0 && grid[i] < 1.0, "frequency grid values must lie in [0, 1)");
    detail::require_arg(i == 0 || grid[i] > grid[i - 1], "frequency grid must be strictly increasing");
  }
}

/// nu_m = m / M, m = 0 .. M-1.
inline RealVector uniform_grid(std::size_t points) {
  detail::require_arg(points >= 1, "grid needs at least one point");
  RealVector grid(points);
  for (std::size_t m = 0; m < points; ++m)
    grid[m] = static_cast<double>(m) / static_cast<double>(points);
  return grid;
}

/// True when grid[m] == m / M exactly, i.e. the grid came from uniform_grid().
inline bool is_uniform_grid(std::span<const double> grid) {
  const auto points = static_cast<double>(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m)
    if (grid[m] != static_cast<double>(m) / points) return false;
  return !grid.empty();
}

namespace detail {

// exp(sign * 2i pi k / n), with k reduced first so the angle stays in [0, 2pi).
inline Complex unit_root(std::size_t k, std::size_t n, int sign) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
  return {std::cos(angle), sign * std::sin(angle)};
}

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void fft_radix2_inplace(ComplexVector& data, int sign) {
  const std::size_t n = data.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  ComplexVector twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) twiddle[k] = unit_root(k, n, sign);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = twiddle[k * stride] * data[start + k + half];
        data[start + k + half] = data[start + k] - t;
        data[start + k] += t;
      }
    }
  }
}

inline ComplexVector direct_transform(std::span<const Complex> input, int sign) {
  const std::size_t n = input.size();
  ComplexVector output(n);
  for (std::size_t p = 0; p < n; ++p) {
    Complex acc = 0.0;
    for (std::size_t q = 0; q < n; ++q) acc += input[q] * unit_root((p * q) % n, n, sign);
    output[p] = acc;
  }
  return output;
}

/// sum_q v_q exp(sign * 2i pi p q / P), no scaling. Radix-2 when P is a power
/// of two, direct summation otherwise.
inline ComplexVector unnormalized_transform(std::span<const Complex> input, int sign) {
  detail::require_arg(!input.empty(), "Fourier transform of an empty vector");
  if (is_power_of_two(input.size())) {
    ComplexVector data(input.begin(), input.end());
    fft_radix2_inplace(data, sign);
    return data;
  }
  return direct_transform(input, sign);
}

inline ComplexVector scaled(ComplexVector v, double factor) {
  for (auto& x : v) x *= factor;
  return v;
}

}  // namespace detail

/// F_P v.
inline ComplexVector dft(std::span<const Complex> v) {
  auto out = detail::unnormalized_transform(v, -1);
  return detail::scaled(std::move(out), 1.0 / std::sqrt(static_cast<double>(v.size())));
}

/// F_P^dagger v, the exact inverse of dft().
inline ComplexVector idft(std::span<const Complex> v) {
  auto out = detail::unnormalized_transform(v, +1);
  return detail::scaled(std::move(out), 1.0 / std::sqrt(static_cast<double>(v.size())));
}

inline ComplexVector zero_pad(std::span<const Complex> y, std::size_t padded_size) {
  detail::require_arg(padded_size >= y.size(), "zero padding target " + std::to_string(padded_size) +
                                                   " is shorter than the series (" + std::to_string(y.size()) + ")");
  ComplexVector out(padded_size, Complex{0.0, 0.0});
  std::copy(y.begin(), y.end(), out.begin());
  return out;
}

inline ComplexVector zero_pad(const TimeSeries& y, std::size_t padded_size) {
  return zero_pad(y.samples(), padded_size);
}

/// W_NP a: the first N samples of the discrete-frequency model.
inline TimeSeries synthesis_df(const SpectrumDF& a, std::size_t samples) {
  detail::require_arg(samples >= 1 && samples <= a.grid_size(), "synthesis needs 1 <= N <= P");
  auto full = idft(a.amps);
  full.resize(samples);
  return TimeSeries(std::move(full));
}

/// W_NP^dagger y = F_P (zero-padded y).
inline SpectrumDF adjoint_synthesis_df(std::span<const Complex> y, std::size_t grid_size) {
  return SpectrumDF{dft(zero_pad(y, grid_size))};
}

inline SpectrumDF adjoint_synthesis_df(const TimeSeries& y, std::size_t grid_size) {
  return adjoint_synthesis_df(y.samples(), grid_size);
}

/// (W_N^dagger z)(nu) = sum_n z_n exp(-2i pi nu n) at every grid point.
///
/// Uniform grids (m / M) go through one folded transform of size M; any other
/// grid is summed point by point, optionally split across `threads` workers.
/// Each point is computed independently, so the output does not depend on
/// the thread count.
inline SpectrumCF adjoint_synthesis_cf(std::span<const Complex> z, std::span<const double> grid,
                                       std::size_t threads = 1) {
  detail::require_arg(!z.empty(), "adjoint synthesis of an empty vector");
  validate_grid(grid);
  SpectrumCF out{RealVector(grid.begin(), grid.end()), ComplexVector(grid.size())};
  if (grid.empty()) return out;

  if (is_uniform_grid(grid)) {
    const std::size_t points = grid.size();
    ComplexVector folded(points, Complex{0.0, 0.0});
    for (std::size_t n = 0; n < z.size(); ++n) folded[n % points] += z[n];
    out.values = detail::unnormalized_transform(folded, -1);
    return out;
  }

  parallel_for(grid.size(), threads, [&](std::size_t m) {
    Complex acc = 0.0;
    for (std::size_t n = 0; n < z.size(); ++n) {
      const double turns = grid[m] * static_cast<double>(n);
      const double angle = -2.0 * std::numbers::pi * (turns - std::floor(turns));
      acc += z[n] * Complex{std::cos(angle), std::sin(angle)};
    }
    out.values[m] = acc;
  });
  return out;
}

}  // namespace regspec
