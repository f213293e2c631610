#include "rmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rmf/errors.hpp"

namespace rmf {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

GaussianTruncation gaussian_truncation(double a) {
  if (!(a >= 0.0)) throw InvalidArgument("truncation level must be >= 0");
  GaussianTruncation g;
  g.a = a;
  if (std::isinf(a)) {
    g.value = 1.0;
    return g;
  }
  g.density_term = 2.0 * a * std::numbers::inv_sqrtpi / std::numbers::sqrt2 * std::exp(-a * a / 2.0);
  g.tail_term = 2.0 * (a * a - 1.0) * normal_upper_tail(a);
  g.value = 1.0 - g.density_term + g.tail_term;
  return g;
}

double gaussian_truncated_second_moment(double a) { return gaussian_truncation(a).value; }

double ks_statistic(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("KS statistic needs at least one sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = normal_cdf(s[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

void MomentAccumulator::add(double v) noexcept {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = v - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_ - 4 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2) - 3 * delta_n * m2_;
  m2_ += term1;
}

double MomentAccumulator::kurtosis() const noexcept {
  if (n_ == 0 || m2_ == 0.0) return std::nan("");
  return static_cast<double>(n_) * m4_ / (m2_ * m2_);
}

double MomentAccumulator::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(sample_variance() / static_cast<double>(n_)) : 0.0;
}

}  // namespace rmf
