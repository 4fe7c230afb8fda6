#include <gtest/gtest.h>

#include "regspec/estimator.hpp"
#include "regspec/prior_process.hpp"
#include "test_support.hpp"

using namespace regspec;

namespace {

std::mt19937_64 gen(37);

}  // namespace

TEST(Kernel, SeriesMatchesClosedForm) {
  const SobolevKernelParams params(1.0, 1.0);
  EXPECT_NEAR(kernel_series(0.25, params, kDefaultSeriesTerms), kernel_closed(0.25, params), 1e-6);
  const auto z = kernel_series_complex(0.25, params, kDefaultSeriesTerms);
  EXPECT_LT(std::abs(z.imag()), 1e-12);
}

TEST(Kernel, SeriesSymmetricAboutHalf) {
  const SobolevKernelParams params(2.0, 0.5);
  for (double nu : {0.05, 0.2, 0.37}) {
    EXPECT_NEAR(kernel_series(nu, params, 2000), kernel_series(1.0 - nu, params, 2000), 1e-12);
    EXPECT_NEAR(kernel_closed(nu, params), kernel_closed(1.0 - nu, params), 1e-14);
    EXPECT_EQ(kernel_closed(nu, params), kernel_closed(-nu, params));
  }
}

TEST(Kernel, IntegralIsInverseAlpha0) {
  for (auto [a0, a1] : {std::pair{1.0, 1.0}, {4.0, 0.25}, {0.01, 10.0}}) {
    const SobolevKernelParams params(a0, a1);
    const double integral =
        regspec::testing::simpson([&](double nu) { return kernel_closed(nu, params); }, 0.0, 1.0, 4000);
    EXPECT_NEAR(integral, 1.0 / a0, 1e-8 / a0) << a0 << "," << a1;
  }
}

TEST(Kernel, SlopeAtZeroIsMinusHalfInverseAlpha1) {
  for (auto [a0, a1] : {std::pair{1.0, 1.0}, {4.0, 0.25}, {0.3, 2.0}}) {
    const SobolevKernelParams params(a0, a1);
    const double h = 1e-6;
    const double right = (kernel_closed(h, params) - kernel_closed(0.0, params)) / h;
    const double left = (kernel_closed(0.0, params) - kernel_closed(-h, params)) / h;
    EXPECT_NEAR(right, -1.0 / (2.0 * a1), 1e-4 / a1);
    EXPECT_NEAR(left, 1.0 / (2.0 * a1), 1e-4 / a1);
    EXPECT_GT(std::abs(right + 1.0 / a1), 0.4 / a1);
  }
}

TEST(Kernel, ExtremaAtZeroAndHalf) {
  const SobolevKernelParams params(3.0, 0.2);
  const double at_half = kernel_closed(0.5, params);
  const double at_zero = kernel_closed(0.0, params);
  EXPECT_NEAR(kernel_closed(1.0, params), at_zero, 1e-14);
  EXPECT_NEAR(kernel_closed(-1.0, params), at_zero, 1e-14);
  for (int i = -100; i <= 100; ++i) {
    const double v = kernel_closed(i / 100.0, params);
    EXPECT_GE(v, at_half - 1e-15);
    EXPECT_LE(v, at_zero + 1e-15);
  }
}

TEST(Kernel, LargeAlphaDoesNotOverflow) {
  const SobolevKernelParams params(1e6, 1e-2);  // alpha = 1e4
  const double g0 = kernel_closed(0.0, params);
  EXPECT_TRUE(std::isfinite(g0));
  EXPECT_NEAR(g0, 1.0 / (2.0 * params.alpha_prime()), 1e-12 * g0);
  EXPECT_EQ(kernel_closed(0.4, params), 0.0);
  const SobolevKernelParams moderate(900.0, 1.0);  // alpha = 30, both code paths agree at the seam
  const double a = moderate.alpha();
  for (double nu : {0.0, 0.1, 0.5}) {
    const double textbook = std::cosh(a * (nu - 0.5)) / (2.0 * moderate.alpha_prime() * std::sinh(a / 2.0));
    EXPECT_NEAR(kernel_closed(nu, moderate), textbook, 1e-13 * textbook);
  }
}

TEST(Kernel, SmallAlpha1TendsToWhiteNoise) {
  const SobolevKernelParams params(1.0, 1e-4);
  EXPECT_LT(kernel_closed(0.3, params), 1e-10);
  const double integral =
      regspec::testing::simpson([&](double nu) { return kernel_closed(nu, params); }, 0.0, 1.0, 200000);
  EXPECT_NEAR(integral, 1.0, 1e-8);
}

TEST(Kernel, RejectsInvalidParameters) {
  EXPECT_THROW(SobolevKernelParams(0.0, 1.0), Error);
  EXPECT_THROW(SobolevKernelParams(1.0, -1.0), Error);
  EXPECT_THROW(kernel_closed(1.5, SobolevKernelParams(1.0, 1.0)), Error);
}

TEST(Kernel, TermsForTolerance) {
  const SobolevKernelParams params(4.0, 0.25);
  const auto terms = series_terms_for_tolerance(params, 1e-7);
  EXPECT_GE(static_cast<double>(terms), 1.0 / (2.0 * std::numbers::pi * std::numbers::pi * 0.25 * 1e-7));
  EXPECT_EQ(series_terms_for_tolerance(params, 1.0), kDefaultSeriesTerms);
}

TEST(ConditionalCov, BoundaryZerosAndDualForms) {
  const SobolevKernelParams params(1.0, 1.0);
  EXPECT_NEAR(conditional_cov(0.6, 0.0, params).difference_form, 0.0, 1e-12);
  EXPECT_EQ(conditional_cov(0.6, 0.0, params).product_form, 0.0);
  EXPECT_NEAR(conditional_cov(1.0, 0.3, params).difference_form, 0.0, 1e-12);
  EXPECT_EQ(conditional_cov(1.0, 0.3, params).product_form, 0.0);
  const auto c = conditional_cov(0.75, 0.25, params);
  EXPECT_NEAR(c.difference_form, c.product_form, 1e-9);
  EXPECT_TRUE(c.consistent);
  EXPECT_THROW(conditional_cov(0.2, 0.5, params), Error);
}

TEST(ConditionalCov, ExponentSafeBranch) {
  const SobolevKernelParams params(1e4, 1.0);  // alpha = 100
  for (auto [nu, nu_p] : {std::pair{0.5, 0.45}, {0.9, 0.1}, {0.2, 0.19}}) {
    const auto c = conditional_cov(nu, nu_p, params);
    EXPECT_TRUE(c.consistent) << nu << "," << nu_p << ": " << c.difference_form << " vs " << c.product_form;
  }
}

TEST(ConditionalCov, MarkovFactorization) {
  const SobolevKernelParams params(2.0, 0.7);
  const double n1 = 0.15, n2 = 0.4, n3 = 0.8;
  const auto c = [&](double a, double b) { return conditional_cov(a, b, params).difference_form; };
  EXPECT_NEAR(c(n3, n1) * c(n2, n2), c(n2, n1) * c(n3, n2), 1e-9);
}

TEST(IncrementCov, GeneralFormTendsToBrownianBridge) {
  const SobolevKernelParams params(1e-8, 1.0);
  for (double tau : {0.1, 0.25, 0.5}) {
    const auto general = increment_cov(0.0, tau, 0.5, 0.5 + std::min(tau, 0.5), params);
    const auto bridge = increment_cov(0.0, tau, 0.5, 0.5 + std::min(tau, 0.5), params, IncrementForm::bridge_limit);
    EXPECT_NEAR(general.first, tau * (1.0 - tau), 1e-3 * tau * (1.0 - tau));
    EXPECT_NEAR(general.first, bridge.first, 1e-3 * bridge.first);
    EXPECT_NEAR(general.cross, bridge.cross, 1e-3 * std::abs(bridge.cross));
    EXPECT_NEAR(general.second, bridge.second, 1e-3 * bridge.second);
    EXPECT_LT(general.cross, 0.0);
  }
}

TEST(IncrementCov, HalfVarianceLimitDiffersFromGeneralForm) {
  const SobolevKernelParams params(1e-8, 1.0);
  const auto general = increment_cov(0.1, 0.3, 0.5, 0.6, params);
  const auto half = increment_cov(0.1, 0.3, 0.5, 0.6, params, IncrementForm::half_variance_limit);
  EXPECT_NEAR(general.first / half.first, 2.0, 1e-3);
  EXPECT_LT(general.cross * half.cross, 0.0);
}

TEST(IncrementCov, DegenerateAndUnordered) {
  const SobolevKernelParams params(1.0, 1.0);
  EXPECT_NEAR(increment_cov(0.3, 0.3, 0.5, 0.7, params).first, 0.0, 1e-14);
  EXPECT_THROW(increment_cov(0.3, 0.2, 0.5, 0.7, params), Error);
  EXPECT_THROW(increment_cov(0.1, 0.2, 0.5, 1.2, params), Error);
}

TEST(PosteriorMean, EqualsWindowedTransform) {
  std::uniform_real_distribution<double> loga(-2.0, 1.0);
  const auto grid = RealVector{0.0, 0.11, 0.25, 0.5, 0.73, 0.9};
  for (int trial = 0; trial < 20; ++trial) {
    const SobolevKernelParams params(std::pow(10.0, loga(gen)), std::pow(10.0, loga(gen)));
    const PriorModel prior{params, std::pow(10.0, loga(gen)), std::pow(10.0, loga(gen))};
    const TimeSeries y(regspec::testing::random_complex(8, gen));
    const auto oracle = posterior_mean_oracle(y, prior, grid);
    const RealVector alphas{params.alpha0(), params.alpha1()};
    const auto closed = windowed_periodogram_cf(y, prior.lambda(), alphas, grid);
    EXPECT_LT(regspec::testing::relative_l2(closed.spectrum.values, oracle.values), 1e-9);
  }
}

TEST(PosteriorMean, WhitePriorGivesUsualPeriodogram) {
  const TimeSeries y(regspec::testing::random_complex(6, gen));
  const PriorModel prior{TabulatedCorrelation{RealVector(6, 1.0)}, 2.0, 0.5};
  const auto grid = uniform_grid(12);
  const auto oracle = posterior_mean_oracle(y, prior, grid);
  const auto usual = usual_periodogram_cf(y, 0.25, grid);
  EXPECT_LT(regspec::testing::max_abs_diff(oracle.values, usual.values), 1e-12);
}

TEST(PosteriorMean, ZeroDataGivesZero) {
  const PriorModel prior{SobolevKernelParams(1.0, 1.0), 1.0, 1.0};
  const auto out = posterior_mean_oracle(TimeSeries(ComplexVector(5)), prior, RealVector{0.0, 0.5});
  for (const auto& v : out.values) EXPECT_EQ(std::abs(v), 0.0);
}

TEST(PriorSampler, WhiteEigenvaluesGiveIndependentEntries) {
  const std::size_t p_total = 4;
  const double r_a = 2.5;
  const RealVector evals{1.0, 0.5, 2.0, 4.0};
  constexpr std::size_t draws = 10000;
  PriorSampler sampler(99);
  std::vector<ComplexVector> samples;
  for (std::size_t k = 0; k < draws; ++k) samples.push_back(sampler.draw(evals, r_a).amps);
  // Target r_a F diag(1/e) F^dagger built entry by entry.
  for (std::size_t j = 0; j < p_total; ++j)
    for (std::size_t l = 0; l < p_total; ++l) {
      Complex target = 0.0;
      for (std::size_t p = 0; p < p_total; ++p)
        target += regspec::testing::exp_i(-2.0 * std::numbers::pi * static_cast<double>((j - l + 4 * p_total) * p % p_total) / 4.0) /
                  evals[p];
      target *= r_a / static_cast<double>(p_total);
      Complex estimate = 0.0;
      for (const auto& s : samples) estimate += s[j] * std::conj(s[l]);
      estimate /= static_cast<double>(draws);
      const double diag_j = r_a * (1.0 + 2.0 + 0.5 + 0.25) / 4.0;
      const double se = std::sqrt(diag_j * diag_j / static_cast<double>(draws));
      EXPECT_NEAR(estimate.real(), target.real(), 3.0 * se) << j << "," << l;
      EXPECT_NEAR(estimate.imag(), target.imag(), 3.0 * se) << j << "," << l;
    }
}

TEST(PriorSampler, UnitEigenvaluesAndDeterminism) {
  const auto a = sample_prior_df(RealVector(16, 1.0), 3.0, 16, 5);
  const auto b = sample_prior_df(RealVector(16, 1.0), 3.0, 16, 5);
  EXPECT_EQ(a.amps, b.amps);
  const auto c = sample_prior_df(RealVector(16, 1.0), 3.0, 16, 6);
  EXPECT_NE(a.amps, c.amps);

  PriorSampler sampler(8);
  double power = 0.0, cross = 0.0;
  constexpr int draws = 4000;
  for (int k = 0; k < draws; ++k) {
    const auto s = sampler.draw(RealVector(8, 1.0), 3.0).amps;
    power += std::norm(s[3]);
    cross += (s[1] * std::conj(s[6])).real();
  }
  EXPECT_NEAR(power / draws, 3.0, 3.0 * 3.0 / std::sqrt(double(draws)));
  EXPECT_NEAR(cross / draws, 0.0, 3.0 * 3.0 / std::sqrt(2.0 * draws));
}

TEST(PriorSampler, ZeroEigenvalueRejected) {
  try {
    sample_prior_df(RealVector{0.0, 1.0, 1.0}, 1.0, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::normalization_undefined);
  }
}
