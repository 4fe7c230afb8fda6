#pragma once

// Monte-Carlo comparison of the usual periodogram against the RLS windowed
// periodogram with maximum-likelihood (alpha0, alpha1).
//
// Each realization filters white Gaussian noise through a short FIR filter h,
// so the true power spectrum is |H(nu)|^2. Per realization the harness
// computes the usual periodogram (lambda = 0), the ML-tuned RLS estimate, the
// four distances of each to the truth, and, for each distance, the grid node
// that an oracle knowing the truth would have picked.
//
// Estimates are compared as |a(nu)|^2 / N against |H(nu)|^2. Distances are
// d(estimate, truth), with the spectral floor 1e-12 * max |H|^2.
//
// Everything is a pure function of SimConfig: realization k draws from the
// seed Rng::derive_seed(master_seed, k), and realizations are aggregated in
// index order whatever the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/estimator.hpp"
#include "regspec/fourier.hpp"
#include "regspec/likelihood.hpp"
#include "regspec/metrics.hpp"
#include "regspec/parallel.hpp"
#include "regspec/penalty.hpp"
#include "regspec/random.hpp"

namespace regspec {

enum class NoiseKind { complex_circular, real };

/// How RLS estimates are scaled before comparison. `per_sample` divides
/// |a|^2 by N, like the usual periodogram. `window_energy` divides by
/// sum_n w_n^2 instead, the usual tapered-periodogram scaling.
enum class SpectrumScaling { per_sample, window_energy };

struct SimConfig {
  std::size_t samples = 512;
  RealVector taps{1.0, -2.0, 3.0, -2.0, 1.0};
  std::size_t realizations = 100;
  std::uint64_t master_seed = 1;
  std::size_t grid_size = 0;  // 0 selects 4 N
  std::size_t alpha_points = 100;
  double alpha_lo = 1e-10;
  double alpha_hi = 1e10;
  NoiseKind noise = NoiseKind::complex_circular;
  SpectrumScaling scaling = SpectrumScaling::per_sample;
  std::size_t threads = 1;
  bool keep_spectra = false;

  std::size_t spectrum_grid_size() const { return grid_size == 0 ? 4 * samples : grid_size; }

  void validate() const {
    detail::require_arg(!taps.empty(), "filter needs at least one tap");
    for (double h : taps) detail::require_arg(std::isfinite(h), "filter taps must be finite");
    detail::require_arg(samples >= taps.size(), "need at least as many samples as filter taps");
    detail::require_arg(realizations >= 1, "need at least one realization");
    detail::require_arg(alpha_points >= 1 && alpha_lo > 0.0 && alpha_hi >= alpha_lo, "invalid alpha grid");
    detail::require_arg(alpha_points == 1 || alpha_hi > alpha_lo, "alpha grid with several points needs lo < hi");
  }

  RealVector alpha_grid() const { return log_space(alpha_lo, alpha_hi, alpha_points); }
};

enum Distance : std::size_t { kL1 = 0, kL2 = 1, kIsd = 2, kSis = 3 };
inline constexpr std::size_t kDistanceCount = 4;
inline constexpr std::array<std::string_view, kDistanceCount> kDistanceNames{"L1", "L2", "ISD", "SIS"};

using DistanceArray = std::array<double, kDistanceCount>;

/// N samples of h * x for white x, keeping only fully overlapped outputs.
inline TimeSeries gen_signal(const SimConfig& config, std::size_t index) {
  config.validate();
  Rng rng(Rng::derive_seed(config.master_seed, index));
  const std::size_t taps = config.taps.size();
  ComplexVector noise(config.samples + taps - 1);
  for (auto& x : noise)
    x = config.noise == NoiseKind::complex_circular ? rng.circular_gaussian() : Complex{rng.gaussian(), 0.0};
  ComplexVector y(config.samples);
  for (std::size_t n = 0; n < config.samples; ++n) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += config.taps[k] * noise[n + taps - 1 - k];
    y[n] = acc;
  }
  return TimeSeries(std::move(y));
}

/// |H(m / M)|^2 with H(nu) = sum_k h_k exp(-2i pi nu k).
inline PowerSpectrumGrid true_spectrum(std::span<const double> taps, std::size_t grid_size) {
  detail::require_arg(!taps.empty(), "filter needs at least one tap");
  ComplexVector h(taps.begin(), taps.end());
  const auto response = adjoint_synthesis_cf(h, uniform_grid(grid_size));
  RealVector power(grid_size);
  for (std::size_t m = 0; m < grid_size; ++m) power[m] = std::norm(response.values[m]);
  return PowerSpectrumGrid(std::move(power));
}

inline DistanceArray all_distances(const PowerSpectrumGrid& estimate, const PowerSpectrumGrid& truth, double floor) {
  return {dist_l1(estimate, truth), dist_l2(estimate, truth), dist_isd(estimate, truth, floor),
          dist_sis(estimate, truth, floor)};
}

struct AlphaPair {
  double alpha0;
  double alpha1;
};

struct RealizationSpectra {
  RealVector usual;
  RealVector ml;
  RealVector l2_oracle;
  RealVector isd_oracle;
};

struct RealizationResult {
  std::size_t index = 0;
  AlphaPair ml{};
  double cll = 0.0;
  bool boundary_optimum = false;
  DistanceArray usual_distance{};
  DistanceArray rls_distance{};
  std::array<AlphaPair, kDistanceCount> oracle{};
  DistanceArray oracle_distance{};
  double roughness_truth = 0.0;
  double roughness_ml = 0.0;
  double roughness_l2_oracle = 0.0;
  double roughness_isd_oracle = 0.0;
  RealizationSpectra spectra;  // filled only with SimConfig::keep_spectra
};

struct ExperimentReport {
  SimConfig config;
  RealVector truth;
  std::vector<RealizationResult> realizations;
  DistanceArray median_usual{};
  DistanceArray median_rls{};
  DistanceArray mean_usual{};
  DistanceArray mean_rls{};
  DistanceArray gain{};       // (median_usual - median_rls) / median_usual
  DistanceArray mean_gain{};  // same with means
  std::array<std::size_t, kDistanceCount> usual_worse{};  // realizations where d_usual > d_rls
  std::size_t smoothness_ordering_held = 0;  // rough(L2 oracle) <= rough(truth) <= rough(ISD oracle)
  std::size_t ml_between_oracles = 0;        // rough(L2 oracle) <= rough(ML) <= rough(ISD oracle)
};

namespace detail {

inline double median(RealVector values) {
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline PowerSpectrumGrid scaled_power(const EstimateCF& estimate, SpectrumScaling scaling) {
  auto power = power_spectrum(estimate, PowerNormalization::raw);
  double norm = static_cast<double>(estimate.samples);
  if (scaling == SpectrumScaling::window_energy) {
    norm = 0.0;
    for (double w : estimate.window.coeffs()) norm += w * w;
  }
  for (auto& v : power) v /= norm;
  return PowerSpectrumGrid(std::move(power));
}

inline EstimateCF sobolev_estimate(const TimeSeries& y, AlphaPair alphas, std::span<const double> grid) {
  const double coefficients[] = {alphas.alpha0, alphas.alpha1};
  return windowed_periodogram_cf(y, 1.0, coefficients, grid);
}

}  // namespace detail

inline RealizationResult run_realization(const SimConfig& config, const PowerSpectrumGrid& truth, std::size_t index) {
  const auto grid = uniform_grid(config.spectrum_grid_size());
  const auto alpha_grid = config.alpha_grid();
  const double floor = default_floor(truth);
  const auto y = gen_signal(config, index);

  RealizationResult result;
  result.index = index;

  const auto usual_amps = usual_periodogram_cf(y, 0.0, grid);
  const PowerSpectrumGrid usual(power_spectrum(usual_amps.values, y.size(), PowerNormalization::per_sample));
  result.usual_distance = all_distances(usual, truth, floor);

  const auto fit = fit_alpha_grid(y, alpha_grid, alpha_grid);
  result.ml = {*fit.report.alpha0, *fit.report.alpha1};
  result.cll = fit.report.cll_value;
  result.boundary_optimum = fit.report.boundary_optimum;
  const auto ml = detail::scaled_power(detail::sobolev_estimate(y, result.ml, grid), config.scaling);
  result.rls_distance = all_distances(ml, truth, floor);

  result.oracle_distance.fill(std::numeric_limits<double>::infinity());
  RealVector l2_oracle, isd_oracle;
  for (double a0 : alpha_grid) {
    for (double a1 : alpha_grid) {
      const AlphaPair alphas{a0, a1};
      auto candidate = detail::scaled_power(detail::sobolev_estimate(y, alphas, grid), config.scaling);
      const auto d = all_distances(candidate, truth, floor);
      for (std::size_t k = 0; k < kDistanceCount; ++k) {
        if (d[k] < result.oracle_distance[k]) {
          result.oracle_distance[k] = d[k];
          result.oracle[k] = alphas;
          if (k == kL2) l2_oracle.assign(candidate.values().begin(), candidate.values().end());
          if (k == kIsd) isd_oracle.assign(candidate.values().begin(), candidate.values().end());
        }
      }
    }
  }

  result.roughness_truth = roughness(truth);
  result.roughness_ml = roughness(ml);
  result.roughness_l2_oracle = roughness(PowerSpectrumGrid(l2_oracle));
  result.roughness_isd_oracle = roughness(PowerSpectrumGrid(isd_oracle));

  if (config.keep_spectra) {
    result.spectra.usual.assign(usual.values().begin(), usual.values().end());
    result.spectra.ml.assign(ml.values().begin(), ml.values().end());
    result.spectra.l2_oracle = std::move(l2_oracle);
    result.spectra.isd_oracle = std::move(isd_oracle);
  }
  return result;
}

inline ExperimentReport run_experiment(const SimConfig& config) {
  config.validate();
  const auto truth = true_spectrum(config.taps, config.spectrum_grid_size());
  ExperimentReport report;
  report.config = config;
  report.truth.assign(truth.values().begin(), truth.values().end());
  report.realizations.resize(config.realizations);
  parallel_for(config.realizations, config.threads,
               [&](std::size_t k) { report.realizations[k] = run_realization(config, truth, k); });

  for (std::size_t d = 0; d < kDistanceCount; ++d) {
    RealVector usual, rls;
    for (const auto& r : report.realizations) {
      usual.push_back(r.usual_distance[d]);
      rls.push_back(r.rls_distance[d]);
      if (r.usual_distance[d] > r.rls_distance[d]) ++report.usual_worse[d];
    }
    report.median_usual[d] = detail::median(usual);
    report.median_rls[d] = detail::median(rls);
    report.mean_usual[d] = std::accumulate(usual.begin(), usual.end(), 0.0) / static_cast<double>(usual.size());
    report.mean_rls[d] = std::accumulate(rls.begin(), rls.end(), 0.0) / static_cast<double>(rls.size());
    report.gain[d] = (report.median_usual[d] - report.median_rls[d]) / report.median_usual[d];
    report.mean_gain[d] = (report.mean_usual[d] - report.mean_rls[d]) / report.mean_usual[d];
  }
  for (const auto& r : report.realizations) {
    if (r.roughness_l2_oracle <= r.roughness_truth && r.roughness_truth <= r.roughness_isd_oracle)
      ++report.smoothness_ordering_held;
    if (r.roughness_l2_oracle <= r.roughness_ml && r.roughness_ml <= r.roughness_isd_oracle)
      ++report.ml_between_oracles;
  }
  return report;
}

struct WindowSelectionStudy {
  std::vector<std::string> bank;
  std::vector<std::size_t> selected;  // per realization, index into `bank`
  RealVector lambdas;                 // per realization, fitted lambda of the selected window
  std::vector<std::size_t> counts;    // per bank entry

  std::size_t most_selected() const {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
};

/// Window selection by ML on `config.realizations` simulated signals. The
/// inverse cosine family uses P = 8 N.
inline WindowSelectionStudy run_window_selection(const SimConfig& config,
                                                 std::span<const WindowFamily> families = kSelectionBank,
                                                 const LambdaSearch& search = {}) {
  config.validate();
  const auto bank = make_window_bank(families, config.samples, kDefaultPadFactor * config.samples);
  WindowSelectionStudy study;
  for (const auto& entry : bank) study.bank.push_back(entry.name);
  study.selected.resize(config.realizations);
  study.lambdas.resize(config.realizations);
  parallel_for(config.realizations, config.threads, [&](std::size_t k) {
    const auto selection = select_window(gen_signal(config, k), bank, search);
    study.selected[k] = *selection.best.window_index;
    study.lambdas[k] = selection.best.hyperparams.lambda;
  });
  study.counts.assign(bank.size(), 0);
  for (auto k : study.selected) ++study.counts[k];
  return study;
}

}  // namespace regspec
