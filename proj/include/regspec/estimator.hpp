#pragma once

// Periodograms as closed-form minimizers of regularized least squares.
//
//   usual     a = (1 + lambda)^{-1} W^dagger y
//   windowed  a = W^dagger (w . y),   w_n = 1 / (1 + lambda e_n)
//
// in both the discrete-frequency form (P amplitudes, W = W_NP) and the
// continuous-frequency form (a(nu) evaluated on a grid). lambda = 0 is
// accepted and gives the minimum-norm interpolating solution.
//
// rls_oracle_df() solves the P x P normal equations densely and exists only
// to check the closed forms at desk scale.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"
#include "regspec/penalty.hpp"

namespace regspec {

/// Default zero-padding factor: P = 8 N.
inline constexpr std::size_t kDefaultPadFactor = 8;

/// Estimated amplitudes together with the window that produced them.
/// `empirical_power` is sum_n w_n^2 |y_n|^2, which equals sum_p |a_p|^2 (DF)
/// and int_0^1 |a(nu)|^2 dnu (CF) by Parseval.
template <class Spectrum>
struct Estimate {
  Spectrum spectrum;
  Window window;
  double lambda;
  double empirical_power;
  std::size_t samples;
};

using EstimateDF = Estimate<SpectrumDF>;
using EstimateCF = Estimate<SpectrumCF>;

namespace detail {

inline ComplexVector apply_window(const TimeSeries& y, const Window& window) {
  require_arg(window.size() == y.size(), "window length must match the series length");
  ComplexVector out(y.size());
  for (std::size_t n = 0; n < y.size(); ++n) out[n] = window[n] * y[n];
  return out;
}

inline double windowed_energy(const TimeSeries& y, const Window& window) {
  double total = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) total += window[n] * window[n] * std::norm(y[n]);
  return total;
}

}  // namespace detail

/// a = W_NP^dagger (w . y) for an explicit window.
inline EstimateDF windowed_transform_df(const TimeSeries& y, std::size_t grid_size, Window window, double lambda) {
  auto tapered = detail::apply_window(y, window);
  auto spectrum = adjoint_synthesis_df(tapered, grid_size);
  const double power = detail::windowed_energy(y, window);
  return EstimateDF{std::move(spectrum), std::move(window), lambda, power, y.size()};
}

/// a(nu) = sum_n w_n y_n exp(-2i pi nu n) for an explicit window.
inline EstimateCF windowed_transform_cf(const TimeSeries& y, std::span<const double> grid, Window window,
                                        double lambda, std::size_t threads = 1) {
  auto tapered = detail::apply_window(y, window);
  auto spectrum = adjoint_synthesis_cf(tapered, grid, threads);
  const double power = detail::windowed_energy(y, window);
  return EstimateCF{std::move(spectrum), std::move(window), lambda, power, y.size()};
}

inline SpectrumDF usual_periodogram_df(const TimeSeries& y, std::size_t grid_size, double lambda) {
  validate_lambda(lambda);
  auto a = adjoint_synthesis_df(y, grid_size);
  const double shrink = 1.0 / (1.0 + lambda);
  for (auto& v : a.amps) v *= shrink;
  return a;
}

inline SpectrumCF usual_periodogram_cf(const TimeSeries& y, double lambda, std::span<const double> grid,
                                       std::size_t threads = 1) {
  validate_lambda(lambda);
  auto a = adjoint_synthesis_cf(y.samples(), grid, threads);
  const double shrink = 1.0 / (1.0 + lambda);
  for (auto& v : a.values) v *= shrink;
  return a;
}

inline EstimateDF windowed_periodogram_df(const TimeSeries& y, std::size_t grid_size, double lambda,
                                          const PenaltySpec& penalty) {
  detail::require_arg(grid_size >= y.size(), "grid size P must be at least the number of samples");
  const auto evals = penalty_eigenvalues(penalty, grid_size);
  return windowed_transform_df(y, grid_size, window_from_eigenvalues(evals, lambda, y.size()), lambda);
}

inline EstimateCF windowed_periodogram_cf(const TimeSeries& y, double lambda, std::span<const double> alphas,
                                          std::span<const double> grid, std::size_t threads = 1) {
  validate_alphas(alphas);
  const auto evals = sobolev_eigenvalues(alphas, y.size());
  return windowed_transform_cf(y, grid, window_from_eigenvalues(evals, lambda, y.size()), lambda, threads);
}

enum class PowerNormalization { raw, per_sample };

/// |a|^2, or |a|^2 / N for comparison against a power spectral density.
inline RealVector power_spectrum(std::span<const Complex> values, std::size_t samples,
                                 PowerNormalization normalization) {
  const double scale = normalization == PowerNormalization::per_sample ? 1.0 / static_cast<double>(samples) : 1.0;
  RealVector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::norm(values[i]) * scale;
  return out;
}

inline RealVector power_spectrum(const EstimateDF& estimate, PowerNormalization normalization) {
  return power_spectrum(estimate.spectrum.amps, estimate.samples, normalization);
}

inline RealVector power_spectrum(const EstimateCF& estimate, PowerNormalization normalization) {
  return power_spectrum(estimate.spectrum.values, estimate.samples, normalization);
}

// ---------------------------------------------------------------------------
// Dense verification path.

namespace detail {

using DenseMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using DenseVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

inline constexpr std::size_t kOracleMaxGrid = 64;

/// W_NP built entry by entry from its definition.
inline DenseMatrix synthesis_matrix(std::size_t samples, std::size_t grid_size) {
  DenseMatrix w(static_cast<Eigen::Index>(samples), static_cast<Eigen::Index>(grid_size));
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid_size));
  for (std::size_t n = 0; n < samples; ++n)
    for (std::size_t p = 0; p < grid_size; ++p)
      w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p)) = scale * unit_root(n * p, grid_size, +1);
  return w;
}

/// Dense penalty matrix. Circulant rows are expanded directly
/// (Pi[j, k] = row[(k - j) mod P]); eigenvalue forms go through an explicit
/// F_P Lambda F_P^dagger product.
inline DenseMatrix penalty_matrix(const PenaltySpec& penalty, std::size_t grid_size) {
  const auto size = static_cast<Eigen::Index>(grid_size);
  DenseMatrix pi(size, size);
  if (const auto* circulant = std::get_if<CirculantRow>(&penalty)) {
    require(circulant->row.size() == grid_size, ErrorCode::invalid_penalty,
            "circulant row length must equal the grid size P");
    for (std::size_t j = 0; j < grid_size; ++j)
      for (std::size_t k = 0; k < grid_size; ++k)
        pi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            circulant->row[(k + grid_size - j) % grid_size];
    require((pi - pi.adjoint()).cwiseAbs().maxCoeff() <= kEigenvalueTolerance, ErrorCode::invalid_penalty,
            "circulant penalty matrix is not Hermitian");
    return pi;
  }
  const auto evals = penalty_eigenvalues(penalty, grid_size);
  DenseMatrix fourier(size, size);
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid_size));
  for (std::size_t p = 0; p < grid_size; ++p)
    for (std::size_t q = 0; q < grid_size; ++q)
      fourier(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = scale * unit_root(p * q, grid_size, -1);
  DenseVector diag(size);
  for (std::size_t p = 0; p < grid_size; ++p) diag(static_cast<Eigen::Index>(p)) = evals[p];
  return fourier * diag.asDiagonal() * fourier.adjoint();
}

inline DenseVector to_dense(std::span<const Complex> v) {
  DenseVector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace detail

/// Minimizer of |y - W a|^2 + lambda a^dagger Pi a from the dense normal
/// equations (W^dagger W + lambda Pi) a = W^dagger y. Limited to P <= 64.
inline SpectrumDF rls_oracle_df(const TimeSeries& y, std::size_t grid_size, double lambda,
                                const PenaltySpec& penalty) {
  validate_lambda(lambda);
  detail::require_arg(grid_size >= y.size(), "grid size P must be at least the number of samples");
  detail::require_arg(grid_size <= detail::kOracleMaxGrid, "dense oracle is limited to P <= 64");
  const auto w = detail::synthesis_matrix(y.size(), grid_size);
  const auto pi = detail::penalty_matrix(penalty, grid_size);
  const detail::DenseMatrix normal = w.adjoint() * w + lambda * pi;
  const Eigen::PartialPivLU<detail::DenseMatrix> lu(normal);
  detail::require(lu.rcond() > 1e-13, ErrorCode::singular_system,
                  "normal matrix is singular (lambda = 0 with P > N, or a degenerate penalty)");
  const detail::DenseVector solution = lu.solve(w.adjoint() * detail::to_dense(y.samples()));
  SpectrumDF out{ComplexVector(grid_size)};
  for (std::size_t p = 0; p < grid_size; ++p) out.amps[p] = solution(static_cast<Eigen::Index>(p));
  return out;
}

/// |y - W a|^2 + lambda a^dagger Pi a, evaluated densely.
inline double rls_criterion_df(const TimeSeries& y, const SpectrumDF& a, double lambda, const PenaltySpec& penalty) {
  const std::size_t grid_size = a.grid_size();
  detail::require_arg(grid_size <= detail::kOracleMaxGrid, "dense criterion is limited to P <= 64");
  const auto w = detail::synthesis_matrix(y.size(), grid_size);
  const auto pi = detail::penalty_matrix(penalty, grid_size);
  const auto amps = detail::to_dense(a.amps);
  const detail::DenseVector residual = detail::to_dense(y.samples()) - w * amps;
  const Complex quadratic = amps.dot(pi * amps);
  return residual.squaredNorm() + lambda * quadratic.real();
}

}  // namespace regspec
