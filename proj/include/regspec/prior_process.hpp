#pragma once

// Gaussian prior on the spectral amplitudes a(nu).
//
// The Sobolev penalty alpha0 int |a|^2 + alpha1 int |a'|^2 corresponds to a
// zero-mean circular Gaussian process with correlation
//
//   gamma(nu) = sum_p exp(-2i pi nu p) / (alpha0 + 4 pi^2 alpha1 p^2)        (series)
//             = cosh(alpha (|nu| - 1/2)) / (2 alpha' sinh(alpha / 2))       (closed form)
//
// with alpha = sqrt(alpha0 / alpha1) and alpha' = sqrt(alpha0 alpha1).
//
// Numerical findings, checked by the tests:
//  * the one-sided slopes at nu = 0 are -/+ 1 / (2 alpha1), not -/+ 1 / alpha1;
//  * as alpha0 -> 0 the increment covariance of disjoint intervals tends to
//    the Brownian bridge [tau(1 - tau), -tau tau'; -tau tau', tau'(1 - tau')] / alpha1.
//    The printed limit [tau(1 - tau), 2 tau tau'; ...] / (2 alpha1) is half
//    that on the diagonal and has the wrong sign off the diagonal. Both are
//    available through IncrementForm.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"
#include "regspec/random.hpp"

namespace regspec {

class SobolevKernelParams {
 public:
  SobolevKernelParams(double alpha0, double alpha1) : alpha0_(alpha0), alpha1_(alpha1) {
    detail::require_arg(std::isfinite(alpha0) && alpha0 > 0.0 && std::isfinite(alpha1) && alpha1 > 0.0,
                        "kernel parameters alpha0 and alpha1 must be finite and > 0");
  }

  double alpha0() const { return alpha0_; }
  double alpha1() const { return alpha1_; }
  double alpha() const { return std::sqrt(alpha0_ / alpha1_); }
  double alpha_prime() const { return std::sqrt(alpha0_ * alpha1_); }

  /// Penalty eigenvalue epsilon_p = alpha0 + 4 pi^2 alpha1 p^2.
  double epsilon(long long p) const {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(p);
    return alpha0_ + alpha1_ * w * w;
  }

 private:
  double alpha0_;
  double alpha1_;
};

/// Closed-form correlation for nu in [-1, 1].
///
/// For alpha >= 30 the ratio is evaluated as
///   (e^{alpha (u - 1/2)} + e^{-alpha (u + 1/2)}) / (2 alpha' (1 - e^{-alpha})),  u = |nu| - 1/2,
/// whose exponents are all <= 0, so nothing overflows.
inline double kernel_closed(double nu, const SobolevKernelParams& params) {
  detail::require_arg(nu >= -1.0 && nu <= 1.0, "kernel argument must lie in [-1, 1]");
  const double alpha = params.alpha();
  const double u = std::abs(nu) - 0.5;
  if (alpha < 30.0) return std::cosh(alpha * u) / (2.0 * params.alpha_prime() * std::sinh(alpha / 2.0));
  return (std::exp(alpha * (u - 0.5)) + std::exp(-alpha * (u + 0.5))) /
         (2.0 * params.alpha_prime() * (-std::expm1(-alpha)));
}

/// Symmetric partial sum over p in [-terms, terms], summed in index order.
inline Complex kernel_series_complex(double nu, const SobolevKernelParams& params, std::size_t terms) {
  detail::require_arg(terms >= 1, "series needs at least one term");
  const auto limit = static_cast<long long>(terms);
  Complex total = 0.0;
  for (long long p = -limit; p <= limit; ++p) {
    const double turns = nu * static_cast<double>(p);
    const double angle = -2.0 * std::numbers::pi * (turns - std::floor(turns));
    total += Complex{std::cos(angle), std::sin(angle)} / params.epsilon(p);
  }
  return total;
}

inline double kernel_series(double nu, const SobolevKernelParams& params, std::size_t terms) {
  return kernel_series_complex(nu, params, terms).real();
}

inline constexpr std::size_t kDefaultSeriesTerms = 100000;

/// Truncation T with tail bound sum_{|p| > T} epsilon_p^{-1} <= 1 / (2 pi^2 alpha1 T) below `tolerance`,
/// never less than the default.
inline std::size_t series_terms_for_tolerance(const SobolevKernelParams& params, double tolerance) {
  detail::require_arg(tolerance > 0.0, "tolerance must be positive");
  const double needed = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi * params.alpha1() * tolerance);
  return std::max(kDefaultSeriesTerms, static_cast<std::size_t>(std::ceil(needed)));
}

/// Covariance of a(nu) and a(nu') conditioned on a(1), nu' <= nu, in two forms.
struct ConditionalCovariance {
  double difference_form;  // gamma(nu - nu') - gamma(nu) gamma(nu') / gamma(0)
  double product_form;     // sinh(alpha nu') sinh(alpha (1 - nu)) / (alpha' sinh alpha)
  bool consistent;         // forms agree to 1e-9, relative to gamma(0) when that exceeds 1
};

inline ConditionalCovariance conditional_cov(double nu, double nu_prime, const SobolevKernelParams& params) {
  detail::require_arg(nu_prime >= 0.0 && nu <= 1.0, "conditional covariance needs frequencies in [0, 1]");
  detail::require_arg(nu_prime <= nu, "conditional covariance needs nu' <= nu");
  const double g0 = kernel_closed(0.0, params);
  const double difference =
      kernel_closed(nu - nu_prime, params) - kernel_closed(nu, params) * kernel_closed(nu_prime, params) / g0;
  const double alpha = params.alpha();
  double product = 0.0;
  if (alpha < 30.0) {
    product = std::sinh(alpha * nu_prime) * std::sinh(alpha * (1.0 - nu)) / (params.alpha_prime() * std::sinh(alpha));
  } else {
    // sinh(x) sinh(y) / sinh(x + y + z) with x + y + z = alpha, in exponent-safe form.
    const double x = alpha * nu_prime;
    const double y = alpha * (1.0 - nu);
    product = 0.5 * std::exp(x + y - alpha) * (-std::expm1(-2.0 * x)) * (-std::expm1(-2.0 * y)) /
              (params.alpha_prime() * (-std::expm1(-2.0 * alpha)));
  }
  const double tolerance = 1e-9 * std::max(1.0, g0);
  return {difference, product, std::abs(difference - product) <= tolerance};
}

enum class IncrementForm {
  general,              // r = 2 (gamma(0) - gamma(tau)), rho from four kernel values
  half_variance_limit,  // [tau(1 - tau), 2 tau tau'; 2 tau tau', tau'(1 - tau')] / (2 alpha1)
  bridge_limit,         // [tau(1 - tau), -tau tau'; -tau tau', tau'(1 - tau')] / alpha1
};

/// Covariance of the increments [a(nu2) - a(nu1), a(nu2') - a(nu1')].
struct IncrementCovariance {
  double first;       // r_i
  double cross;       // rho
  double second;      // r'_i
};

inline IncrementCovariance increment_cov(double nu1, double nu2, double nu1p, double nu2p,
                                         const SobolevKernelParams& params,
                                         IncrementForm form = IncrementForm::general) {
  detail::require_arg(0.0 <= nu1 && nu1 <= nu2 && nu2 <= nu1p && nu1p <= nu2p && nu2p <= 1.0,
                      "increment covariance needs 0 <= nu1 <= nu2 <= nu1' <= nu2' <= 1");
  const double tau = nu2 - nu1;
  const double tau_p = nu2p - nu1p;
  const double a1 = params.alpha1();
  switch (form) {
    case IncrementForm::half_variance_limit:
      return {tau * (1.0 - tau) / (2.0 * a1), 2.0 * tau * tau_p / (2.0 * a1), tau_p * (1.0 - tau_p) / (2.0 * a1)};
    case IncrementForm::bridge_limit:
      return {tau * (1.0 - tau) / a1, -tau * tau_p / a1, tau_p * (1.0 - tau_p) / a1};
    case IncrementForm::general:
      break;
  }
  const auto g = [&](double x) { return kernel_closed(x, params); };
  const double g0 = g(0.0);
  return {2.0 * (g0 - g(tau)), g(nu2 - nu2p) + g(nu1 - nu1p) - g(nu1 - nu2p) - g(nu2 - nu1p),
          2.0 * (g0 - g(tau_p))};
}

/// Normalized prior correlation coefficients c_n for n in N_N, given directly.
struct TabulatedCorrelation {
  RealVector coeffs;
};

/// Prior with correlation Fourier coefficients gamma_n = r_a c_n and white
/// observation noise of power r_b. A Sobolev kernel has c_n = 1 / epsilon_n.
struct PriorModel {
  std::variant<SobolevKernelParams, TabulatedCorrelation> kernel;
  double r_a;
  double r_b;

  double lambda() const { return r_b / r_a; }

  double normalized_coefficient(std::size_t n) const {
    if (const auto* sobolev = std::get_if<SobolevKernelParams>(&kernel))
      return 1.0 / sobolev->epsilon(static_cast<long long>(n));
    const auto& table = std::get<TabulatedCorrelation>(kernel).coeffs;
    detail::require_arg(n < table.size(), "tabulated prior has fewer coefficients than samples");
    return table[n];
  }
};

/// E[a(nu) | y] for every grid point by explicit Gaussian conditioning:
/// cross-covariance R_{a y}[n] = gamma_n exp(-2i pi nu n), data covariance
/// R_y = diag(gamma_n + r_b) assembled as a dense Hermitian matrix and
/// factorized. Limited to N <= 64.
inline SpectrumCF posterior_mean_oracle(const TimeSeries& y, const PriorModel& prior, std::span<const double> grid) {
  validate_grid(grid);
  detail::require_arg(y.size() <= 64, "posterior mean oracle is limited to N <= 64");
  detail::require_arg(std::isfinite(prior.r_a) && prior.r_a > 0.0 && std::isfinite(prior.r_b) && prior.r_b >= 0.0,
                      "prior powers must satisfy r_a > 0 and r_b >= 0");
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
  const auto samples = static_cast<Eigen::Index>(y.size());
  RealVector gamma(y.size());
  Matrix data_cov = Matrix::Zero(samples, samples);
  for (std::size_t n = 0; n < y.size(); ++n) {
    gamma[n] = prior.r_a * prior.normalized_coefficient(n);
    const double diagonal = gamma[n] + prior.r_b;
    detail::require_arg(std::isfinite(diagonal) && diagonal > 0.0, "data covariance diagonal must be positive");
    data_cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = diagonal;
  }
  Vector data(samples);
  for (std::size_t n = 0; n < y.size(); ++n) data(static_cast<Eigen::Index>(n)) = y[n];
  const Vector weights = data_cov.ldlt().solve(data);

  SpectrumCF out{RealVector(grid.begin(), grid.end()), ComplexVector(grid.size())};
  for (std::size_t m = 0; m < grid.size(); ++m) {
    Complex mean = 0.0;
    for (std::size_t n = 0; n < y.size(); ++n) {
      const double turns = grid[m] * static_cast<double>(n);
      const double angle = -2.0 * std::numbers::pi * (turns - std::floor(turns));
      mean += gamma[n] * Complex{std::cos(angle), std::sin(angle)} * weights(static_cast<Eigen::Index>(n));
    }
    out.values[m] = mean;
  }
  return out;
}

/// Draws a ~ CN(0, r_a F_P diag(1 / e_p) F_P^dagger).
///
/// Owns its generator; not shareable across threads. Use derive() for
/// independent per-thread samplers.
class PriorSampler {
 public:
  explicit PriorSampler(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  PriorSampler derive(std::uint64_t stream) const { return PriorSampler(Rng::derive_seed(seed_, stream)); }

  SpectrumDF draw(std::span<const double> evals, double r_a) {
    detail::require_arg(std::isfinite(r_a) && r_a > 0.0, "prior power r_a must be > 0");
    detail::require_arg(!evals.empty(), "empty eigenvalue sequence");
    ComplexVector white(evals.size());
    for (std::size_t p = 0; p < evals.size(); ++p) {
      detail::require(evals[p] > 0.0, ErrorCode::normalization_undefined,
                      "improper prior (zero eigenvalue) cannot be sampled");
      white[p] = std::sqrt(r_a / evals[p]) * rng_.circular_gaussian();
    }
    return SpectrumDF{dft(white)};
  }

 private:
  std::uint64_t seed_;
  Rng rng_;
};

inline SpectrumDF sample_prior_df(std::span<const double> evals, double r_a, std::size_t grid_size,
                                  std::uint64_t seed) {
  detail::require_arg(evals.size() == grid_size, "eigenvalue count must equal the grid size P");
  PriorSampler sampler(seed);
  return sampler.draw(evals, r_a);
}

}  // namespace regspec
