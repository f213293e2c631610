#pragma once

#include <span>
#include <vector>

namespace rmf {

/// Standard normal CDF via std::erfc (correctly rounded to a few ulp over the
/// whole real line, including the tails).
double normal_cdf(double z);

/// 1 - Phi(z) without cancellation.
double normal_upper_tail(double z);

/// E min{X^2, a^2} for X ~ N(0,1), split into the two correction terms of
///   1 - (2a / sqrt(2 pi)) e^{-a^2/2} + 2 (a^2 - 1)(1 - Phi(a)).
struct GaussianTruncation {
  double a = 0.0;
  double density_term = 0.0;  ///< (2a / sqrt(2 pi)) e^{-a^2/2}
  double tail_term = 0.0;     ///< 2 (a^2 - 1)(1 - Phi(a))
  double value = 0.0;         ///< 1 - density_term + tail_term
};

GaussianTruncation gaussian_truncation(double a);
double gaussian_truncated_second_moment(double a);

/// One-sample Kolmogorov-Smirnov distance sup |F_n - Phi|. Sorts a copy.
double ks_statistic(std::span<const double> samples);

/// Asymptotic 1% critical value 1.63 / sqrt(n).
double ks_critical_1pct(std::size_t n);

/// Streaming mean and central moments (Welford / Terriberry updates); the
/// combination order is fixed by the caller so results are reproducible.
class MomentAccumulator {
 public:
  void add(double v) noexcept;
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Population variance (divide by n).
  double variance() const noexcept { return n_ ? m2_ / static_cast<double>(n_) : 0.0; }
  /// Unbiased variance (divide by n - 1).
  double sample_variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  /// Central fourth moment over squared variance.
  double kurtosis() const noexcept;
  double central_moment4() const noexcept { return n_ ? m4_ / static_cast<double>(n_) : 0.0; }
  /// Standard error of the mean.
  double standard_error() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

}  // namespace rmf
