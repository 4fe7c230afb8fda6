#pragma once

// Quadratic smoothness penalties and the tapering windows they induce.
//
// A penalty is described by its eigenvalue sequence e_p (a circulant penalty
// matrix is diagonal in the Fourier basis of fourier.hpp). A regularization
// weight lambda turns it into the window w_n = 1 / (1 + lambda e_n); only the
// first N eigenvalues ever reach the data.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "regspec/errors.hpp"
#include "regspec/fourier.hpp"

namespace regspec {

/// Absolute tolerance for the Hermitian / positivity checks on transformed
/// circulant rows.
inline constexpr double kEigenvalueTolerance = 1e-10;

/// Weighted sum of squared derivatives: sum_q alpha_q int |a^(q)|^2.
struct Sobolev {
  RealVector alphas;
};

/// First row of a Hermitian circulant penalty matrix, length P.
struct CirculantRow {
  ComplexVector row;
};

/// Eigenvalues e_0 .. e_{P-1} given directly.
struct Tabulated {
  RealVector evals;
};

using PenaltySpec = std::variant<Sobolev, CirculantRow, Tabulated>;

/// Tapering coefficients w_0 .. w_{N-1}.
class Window {
 public:
  explicit Window(RealVector coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t size() const { return coeffs_.size(); }
  std::span<const double> coeffs() const { return coeffs_; }
  double operator[](std::size_t n) const { return coeffs_[n]; }

 private:
  RealVector coeffs_;
};

inline void validate_alphas(std::span<const double> alphas) {
  detail::require(!alphas.empty(), ErrorCode::invalid_penalty, "Sobolev penalty needs at least one coefficient");
  bool any_positive = false;
  for (double a : alphas) {
    detail::require(std::isfinite(a) && a >= 0.0, ErrorCode::invalid_penalty,
                    "Sobolev coefficients must be finite and non-negative");
    any_positive = any_positive || a > 0.0;
  }
  detail::require(any_positive, ErrorCode::invalid_penalty, "Sobolev penalty with all coefficients zero");
}

/// epsilon_p = sum_q alpha_q (2 pi p)^{2q}. Even in p.
inline double sobolev_eigenvalue(std::span<const double> alphas, long long p) {
  validate_alphas(alphas);
  const double omega2 = std::pow(2.0 * std::numbers::pi * static_cast<double>(p), 2);
  double value = 0.0;
  double power = 1.0;
  for (double a : alphas) {
    value += a * power;
    power *= omega2;
  }
  return value;
}

inline RealVector sobolev_eigenvalues(std::span<const double> alphas, std::span<const long long> indices) {
  validate_alphas(alphas);
  RealVector out;
  out.reserve(indices.size());
  for (long long p : indices) out.push_back(sobolev_eigenvalue(alphas, p));
  return out;
}

/// epsilon_p for p = 0 .. count-1.
inline RealVector sobolev_eigenvalues(std::span<const double> alphas, std::size_t count) {
  std::vector<long long> indices(count);
  for (std::size_t p = 0; p < count; ++p) indices[p] = static_cast<long long>(p);
  return sobolev_eigenvalues(alphas, indices);
}

/// Eigenvalues of the circulant matrix with first row `row`: the unnormalized
/// DFT sqrt(P) * dft(row). Rejects rows whose transform is not real and
/// non-negative within kEigenvalueTolerance; tiny negative values are
/// clamped to zero.
inline RealVector circulant_eigenvalues(std::span<const Complex> row) {
  detail::require(!row.empty(), ErrorCode::invalid_penalty, "empty circulant row");
  const auto spectrum = detail::unnormalized_transform(row, -1);
  RealVector evals(spectrum.size());
  for (std::size_t p = 0; p < spectrum.size(); ++p) {
    detail::require(std::abs(spectrum[p].imag()) <= kEigenvalueTolerance, ErrorCode::invalid_penalty,
                    "circulant penalty is not Hermitian (complex eigenvalue at p = " + std::to_string(p) + ")");
    detail::require(spectrum[p].real() >= -kEigenvalueTolerance, ErrorCode::invalid_penalty,
                    "circulant penalty is indefinite (negative eigenvalue at p = " + std::to_string(p) + ")");
    evals[p] = std::max(0.0, spectrum[p].real());
  }
  return evals;
}

/// e_0 .. e_{P-1} for any penalty form. Sobolev penalties use e_p = epsilon_p
/// with the unsigned index p, so the first N values match the continuous case.
inline RealVector penalty_eigenvalues(const PenaltySpec& penalty, std::size_t grid_size) {
  return std::visit(
      [grid_size](const auto& spec) -> RealVector {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, Sobolev>) {
          validate_alphas(spec.alphas);
          return sobolev_eigenvalues(spec.alphas, grid_size);
        } else if constexpr (std::is_same_v<T, CirculantRow>) {
          detail::require(spec.row.size() == grid_size, ErrorCode::invalid_penalty,
                          "circulant row length must equal the grid size P");
          return circulant_eigenvalues(spec.row);
        } else {
          detail::require(spec.evals.size() == grid_size, ErrorCode::invalid_penalty,
                          "tabulated eigenvalue count must equal the grid size P");
          for (double e : spec.evals)
            detail::require(std::isfinite(e) && e >= 0.0, ErrorCode::invalid_penalty,
                            "tabulated eigenvalues must be finite and non-negative");
          return spec.evals;
        }
      },
      penalty);
}

inline void validate_lambda(double lambda) {
  detail::require_arg(std::isfinite(lambda) && lambda >= 0.0, "regularization weight lambda must be finite and >= 0");
}

/// w_n = 1 / (1 + lambda e_n) for n = 0 .. N-1.
inline Window window_from_eigenvalues(std::span<const double> evals, double lambda, std::size_t samples) {
  validate_lambda(lambda);
  detail::require_arg(evals.size() >= samples, "fewer eigenvalues than samples");
  RealVector coeffs(samples);
  for (std::size_t n = 0; n < samples; ++n) {
    detail::require(std::isfinite(evals[n]) && evals[n] >= 0.0, ErrorCode::invalid_penalty,
                    "window eigenvalues must be finite and non-negative");
    coeffs[n] = 1.0 / (1.0 + lambda * evals[n]);
  }
  return Window(std::move(coeffs));
}

enum class WindowFamily { usual, cauchy, inv_cosine, hamming, hanning, triangular };

inline constexpr WindowFamily kSelectionBank[] = {WindowFamily::cauchy, WindowFamily::inv_cosine,
                                                  WindowFamily::hanning, WindowFamily::hamming,
                                                  WindowFamily::triangular};

inline std::string_view to_string(WindowFamily family) {
  switch (family) {
    case WindowFamily::usual: return "usual";
    case WindowFamily::cauchy: return "cauchy";
    case WindowFamily::inv_cosine: return "inv-cosine";
    case WindowFamily::hamming: return "hamming";
    case WindowFamily::hanning: return "hanning";
    case WindowFamily::triangular: return "triangular";
  }
  return "unknown";
}

/// Accepts the CLI spellings; `inv_cosine` is an alias of `inv-cosine`.
inline WindowFamily parse_window_family(std::string_view name) {
  if (name == "usual") return WindowFamily::usual;
  if (name == "cauchy") return WindowFamily::cauchy;
  if (name == "inv-cosine" || name == "inv_cosine") return WindowFamily::inv_cosine;
  if (name == "hamming") return WindowFamily::hamming;
  if (name == "hanning") return WindowFamily::hanning;
  if (name == "triangular") return WindowFamily::triangular;
  throw Error(ErrorCode::invalid_penalty, "unknown window '" + std::string(name) + "'");
}

/// One-sided reference lag windows with value 1 at n = 0.
inline double reference_lag_window(WindowFamily family, std::size_t n, std::size_t samples) {
  const double x = static_cast<double>(n) / static_cast<double>(samples);
  switch (family) {
    case WindowFamily::hamming: return 0.54 + 0.46 * std::cos(std::numbers::pi * x);
    case WindowFamily::hanning: return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
    case WindowFamily::triangular: return 1.0 - x;
    default: break;
  }
  throw Error(ErrorCode::invalid_penalty, "no reference lag window for '" + std::string(to_string(family)) + "'");
}

/// Eigenvalues e_0 .. e_{N-1} whose window at lambda reproduces the family:
///   usual       e_n = 1
///   cauchy      e_n = 4 pi^2 n^2
///   inv-cosine  e_n = 1 - cos(2 pi n / P)   (needs P >= N)
///   hamming, hanning, triangular
///               e_n = 1 / wbar_n - 1, so lambda = 1 gives the reference wbar.
///
/// Note on the inverse-cosine scaling: the penalty (P^2 / 2) sum |a_k - a_{k-1}|^2
/// has eigenvalues P^2 (1 - cos(2 pi n / P)), which tend to 2 pi^2 n^2 (half of
/// the Cauchy epsilon_n) as P grows. The family here keeps the unscaled
/// 1 - cos form; the factor is absorbed by lambda.
inline RealVector named_window_eigenvalues(WindowFamily family, std::size_t samples, std::size_t grid_size) {
  detail::require_arg(samples >= 1, "window needs at least one sample");
  RealVector evals(samples);
  switch (family) {
    case WindowFamily::usual:
      std::fill(evals.begin(), evals.end(), 1.0);
      break;
    case WindowFamily::cauchy:
      for (std::size_t n = 0; n < samples; ++n) {
        const double w = 2.0 * std::numbers::pi * static_cast<double>(n);
        evals[n] = w * w;
      }
      break;
    case WindowFamily::inv_cosine:
      detail::require_arg(grid_size >= samples, "inverse cosine window needs P >= N");
      for (std::size_t n = 0; n < samples; ++n)
        evals[n] = 1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(grid_size));
      break;
    default:
      for (std::size_t n = 0; n < samples; ++n)
        evals[n] = std::max(0.0, 1.0 / reference_lag_window(family, n, samples) - 1.0);
      break;
  }
  return evals;
}

struct NormalizedPenalty {
  RealVector evals;
  double scale;
};

/// Rescales e_p by c = (1/P) sum_p 1/e_p, which gives the inverse circulant a
/// unit diagonal. The returned scale lets callers fold c into lambda.
inline NormalizedPenalty normalize_penalty(std::span<const double> evals) {
  detail::require_arg(!evals.empty(), "empty eigenvalue sequence");
  double inverse_sum = 0.0;
  for (double e : evals) {
    detail::require(e > 0.0, ErrorCode::normalization_undefined,
                    "penalty has a zero eigenvalue; its inverse has no diagonal to normalize");
    inverse_sum += 1.0 / e;
  }
  const double scale = inverse_sum / static_cast<double>(evals.size());
  NormalizedPenalty out{RealVector(evals.begin(), evals.end()), scale};
  for (auto& e : out.evals) e *= scale;
  return out;
}

}  // namespace regspec
