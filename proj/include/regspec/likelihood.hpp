#pragma once

// Marginal likelihood of the data under the Gaussian prior, and the
// unsupervised choice of lambda, (alpha0, alpha1) and the window shape.
//
// The normalized data covariance is diagonal, Sigma_y = diag(lambda + 1/e_n)
// for n in {0 .. N-1}, so the co-log-likelihood is
//
//   CLL(r_a, lambda) = N log r_a + sum_n log(lambda + 1/e_n) + (1/r_a) sum_n |y_n|^2 / (lambda + 1/e_n)
//
// and after eliminating r_a (r_a_hat = (1/N) sum_n |y_n|^2 / (lambda + 1/e_n)):
//
//   CLL(lambda) = sum_n log(lambda + 1/e_n) + N log sum_n |y_n|^2 / (lambda + 1/e_n)
//
// which differs from the minimum over r_a of the full form by N (1 - log N).
//
// Indices with e_n = 0 (improper prior directions) have infinite variance:
// they are dropped from both sums, and N counts only the retained indices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"
#include "regspec/parallel.hpp"
#include "regspec/penalty.hpp"

namespace regspec {

struct Hyperparams {
  double lambda;
  double r_a;

  double r_b() const { return lambda * r_a; }
};

struct FitReport {
  Hyperparams hyperparams;
  double cll_value;
  std::optional<std::size_t> window_index;
  std::optional<double> alpha0;
  std::optional<double> alpha1;
  std::vector<std::pair<double, double>> search_trace;  // (lambda, CLL)
  bool boundary_optimum = false;
  bool flat_objective = false;
};

/// lambda + 1/e_n for n in N_N; +infinity where e_n = 0.
inline RealVector sigma_y_diag(std::span<const double> evals, double lambda, std::size_t samples) {
  detail::require_arg(std::isfinite(lambda) && lambda > 0.0, "lambda must be finite and > 0");
  detail::require_arg(evals.size() >= samples, "fewer eigenvalues than samples");
  RealVector diag(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    detail::require(std::isfinite(evals[n]) && evals[n] >= 0.0, ErrorCode::invalid_penalty,
                    "penalty eigenvalues must be finite and non-negative");
    diag[n] = evals[n] == 0.0 ? std::numeric_limits<double>::infinity() : lambda + 1.0 / evals[n];
  }
  return diag;
}

namespace detail {

struct QuadraticTerms {
  double log_det = 0.0;   // sum log(lambda + 1/e_n)
  double weighted = 0.0;  // sum |y_n|^2 / (lambda + 1/e_n)
  std::size_t retained = 0;
};

inline QuadraticTerms quadratic_terms(double lambda, const TimeSeries& y, std::span<const double> evals) {
  const auto diag = sigma_y_diag(evals, lambda, y.size());
  QuadraticTerms terms;
  for (std::size_t n = 0; n < y.size(); ++n) {
    if (std::isinf(diag[n])) continue;
    terms.log_det += std::log(diag[n]);
    terms.weighted += std::norm(y[n]) / diag[n];
    ++terms.retained;
  }
  return terms;
}

}  // namespace detail

inline double cll_full(double r_a, double lambda, const TimeSeries& y, std::span<const double> evals) {
  detail::require_arg(std::isfinite(r_a) && r_a > 0.0, "prior power r_a must be finite and > 0");
  const auto terms = detail::quadratic_terms(lambda, y, evals);
  return static_cast<double>(terms.retained) * std::log(r_a) + terms.log_det + terms.weighted / r_a;
}

/// r_a minimizing cll_full at fixed lambda.
inline double optimal_prior_power(double lambda, const TimeSeries& y, std::span<const double> evals) {
  const auto terms = detail::quadratic_terms(lambda, y, evals);
  detail::require(terms.retained > 0 && terms.weighted > 0.0, ErrorCode::degenerate_data,
                  "data carry no energy on the retained coordinates");
  return terms.weighted / static_cast<double>(terms.retained);
}

inline double concentrated_cll(double lambda, const TimeSeries& y, std::span<const double> evals) {
  const auto terms = detail::quadratic_terms(lambda, y, evals);
  detail::require(terms.retained > 0 && terms.weighted > 0.0, ErrorCode::degenerate_data,
                  "data carry no energy on the retained coordinates");
  return terms.log_det + static_cast<double>(terms.retained) * std::log(terms.weighted);
}

/// `points` values spaced evenly in log between lo and hi inclusive.
inline RealVector log_space(double lo, double hi, std::size_t points) {
  detail::require_arg(lo > 0.0 && hi >= lo && points >= 1, "log grid needs 0 < lo <= hi and points >= 1");
  RealVector out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double log_lo = std::log10(lo);
  const double step = (std::log10(hi) - log_lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = std::pow(10.0, log_lo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

struct LambdaSearch {
  double lo = 1e-8;
  double hi = 1e8;
  std::size_t points = 200;
  double log_tolerance = 1e-6;  // golden-section stops when the bracket in log(lambda) is this narrow
  std::size_t max_refine_iters = 200;
};

/// Coarse log-grid scan, then golden-section refinement on log(lambda) inside
/// the bracket around the best grid node. An optimum on the first or last
/// node, or tied with the minimum to rounding, is returned as-is with
/// `boundary_optimum`; an objective that does not move across the grid is
/// reported with `flat_objective`.
inline FitReport fit_lambda(const TimeSeries& y, std::span<const double> evals, const LambdaSearch& search = {}) {
  detail::require_arg(search.lo > 0.0 && search.hi > search.lo && search.points >= 3,
                      "lambda search needs 0 < lo < hi and at least 3 grid points");
  const auto grid = log_space(search.lo, search.hi, search.points);
  FitReport report{};
  report.search_trace.reserve(grid.size());
  std::size_t best = 0;
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double value = concentrated_cll(grid[i], y, evals);
    report.search_trace.emplace_back(grid[i], value);
    if (value < lowest) {
      lowest = value;
      best = i;
    }
    highest = std::max(highest, value);
  }

  const double tie = 1e-12 * (1.0 + std::abs(lowest));
  if (report.search_trace.back().second <= lowest + tie)
    best = grid.size() - 1;
  else if (report.search_trace.front().second <= lowest + tie)
    best = 0;

  double lambda = grid[best];
  double value = report.search_trace[best].second;
  report.flat_objective = highest - lowest <= tie;
  report.boundary_optimum = !report.flat_objective && (best == 0 || best + 1 == grid.size());

  if (!report.flat_objective && !report.boundary_optimum) {
    const auto objective = [&](double log_lambda) { return concentrated_cll(std::exp(log_lambda), y, evals); };
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(grid[best - 1]);
    double b = std::log(grid[best + 1]);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (std::size_t iter = 0; iter < search.max_refine_iters && b - a > search.log_tolerance; ++iter) {
      if (fc <= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
    }
    const double refined = std::exp(0.5 * (a + b));
    const double refined_value = concentrated_cll(refined, y, evals);
    if (refined_value <= value) {
      lambda = refined;
      value = refined_value;
    }
  }

  report.hyperparams = {lambda, optimal_prior_power(lambda, y, evals)};
  report.cll_value = value;
  return report;
}

/// Result of the (alpha0, alpha1) scan with lambda fixed to 1.
struct AlphaGridFit {
  FitReport report;
  RealVector alpha0_grid;
  RealVector alpha1_grid;
  RealVector surface;  // row-major: surface[i0 * alpha1_grid.size() + i1]

  double at(std::size_t i0, std::size_t i1) const { return surface[i0 * alpha1_grid.size() + i1]; }
};

/// Concentrated CLL over epsilon_n = alpha0 + 4 pi^2 alpha1 n^2 with lambda = 1
/// (the overall scale of the penalty plays the role of lambda). Nodes are
/// evaluated independently and the argmin is taken in index order, so the
/// result does not depend on `threads`. Ties go to the first node.
inline AlphaGridFit fit_alpha_grid(const TimeSeries& y, std::span<const double> alpha0_grid,
                                   std::span<const double> alpha1_grid, std::size_t threads = 1) {
  detail::require_arg(!alpha0_grid.empty() && !alpha1_grid.empty(), "alpha grids must be non-empty");
  for (auto grid : {alpha0_grid, alpha1_grid})
    for (std::size_t i = 0; i < grid.size(); ++i)
      detail::require_arg(grid[i] > 0.0 && (i == 0 || grid[i] > grid[i - 1]),
                          "alpha grids must be positive and strictly increasing");
  AlphaGridFit fit{FitReport{}, RealVector(alpha0_grid.begin(), alpha0_grid.end()),
                   RealVector(alpha1_grid.begin(), alpha1_grid.end()),
                   RealVector(alpha0_grid.size() * alpha1_grid.size())};
  const std::size_t columns = alpha1_grid.size();
  parallel_for(alpha0_grid.size(), threads, [&](std::size_t i0) {
    RealVector evals(y.size());
    for (std::size_t i1 = 0; i1 < columns; ++i1) {
      const double alphas[] = {alpha0_grid[i0], alpha1_grid[i1]};
      for (std::size_t n = 0; n < y.size(); ++n) evals[n] = sobolev_eigenvalue(alphas, static_cast<long long>(n));
      fit.surface[i0 * columns + i1] = concentrated_cll(1.0, y, evals);
    }
  });
  const auto best = static_cast<std::size_t>(std::min_element(fit.surface.begin(), fit.surface.end()) -
                                             fit.surface.begin());
  const std::size_t i0 = best / columns;
  const std::size_t i1 = best % columns;
  const double alphas[] = {alpha0_grid[i0], alpha1_grid[i1]};
  const auto evals = sobolev_eigenvalues(alphas, y.size());
  fit.report.hyperparams = {1.0, optimal_prior_power(1.0, y, evals)};
  fit.report.cll_value = fit.surface[best];
  fit.report.alpha0 = alpha0_grid[i0];
  fit.report.alpha1 = alpha1_grid[i1];
  fit.report.boundary_optimum = (alpha0_grid.size() > 1 && (i0 == 0 || i0 + 1 == alpha0_grid.size())) ||
                                (columns > 1 && (i1 == 0 || i1 + 1 == columns));
  return fit;
}

/// CSV with header `alpha0,alpha1,cll`, one row per grid node.
template <class NumberFormatter>
void write_surface_csv(std::ostream& out, const AlphaGridFit& fit, NumberFormatter&& format) {
  out << "alpha0,alpha1,cll\n";
  for (std::size_t i0 = 0; i0 < fit.alpha0_grid.size(); ++i0)
    for (std::size_t i1 = 0; i1 < fit.alpha1_grid.size(); ++i1)
      out << format(fit.alpha0_grid[i0]) << ',' << format(fit.alpha1_grid[i1]) << ',' << format(fit.at(i0, i1))
          << '\n';
}

struct WindowBankEntry {
  std::string name;
  RealVector evals;
};

struct WindowSelection {
  FitReport best;
  std::vector<FitReport> candidates;  // one per bank entry, in bank order
};

/// Fits lambda for every window in the bank and keeps the smallest CLL; ties
/// go to the lowest index.
inline WindowSelection select_window(const TimeSeries& y, std::span<const WindowBankEntry> bank,
                                     const LambdaSearch& search = {}) {
  detail::require_arg(!bank.empty(), "window bank is empty");
  WindowSelection selection;
  selection.candidates.reserve(bank.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    auto report = fit_lambda(y, bank[k].evals, search);
    report.window_index = k;
    if (k > 0 && report.cll_value < selection.candidates[best].cll_value) best = k;
    selection.candidates.push_back(std::move(report));
  }
  selection.best = selection.candidates[best];
  return selection;
}

/// Bank of named windows for N samples; inverse cosine uses grid size P.
inline std::vector<WindowBankEntry> make_window_bank(std::span<const WindowFamily> families, std::size_t samples,
                                                     std::size_t grid_size) {
  std::vector<WindowBankEntry> bank;
  bank.reserve(families.size());
  for (auto family : families)
    bank.push_back({std::string(to_string(family)), named_window_eigenvalues(family, samples, grid_size)});
  return bank;
}

}  // namespace regspec
