#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rmf/stats.hpp"

using namespace rmf;

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Composite Simpson on [-L, L] with the a^2 plateau integrated in closed form beyond.
double truncated_by_quadrature(double a) {
  const int n = 200'000;
  const double lo = -a, hi = a, h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * x * x * phi(x);
  }
  return s * h / 3.0 + a * a * std::erfc(a / std::numbers::sqrt2);
}

double ks_brute(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = 0.5 * std::erfc(-v[i] / std::numbers::sqrt2);
    d = std::max({d, std::abs((i + 1) / n - F), std::abs(i / n - F)});
  }
  return d;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("normal distribution function") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-15));
  CHECK(normal_upper_tail(3.0) == doctest::Approx(0.0013498980316300957).epsilon(1e-14));
  CHECK(normal_upper_tail(10.0) == doctest::Approx(7.619853024160593e-24).epsilon(1e-13));
  for (double z = -8.0; z <= 8.0; z += 0.25) CHECK(normal_cdf(z) + normal_upper_tail(z) == doctest::Approx(1.0));
}

TEST_CASE("truncated Gaussian second moment") {
  const auto g = gaussian_truncation(3.0);
  CHECK(g.density_term == doctest::Approx(0.026591090471628043).epsilon(1e-13));
  CHECK(g.tail_term == doctest::Approx(0.02159836850608153).epsilon(1e-13));
  CHECK(g.value == doctest::Approx(1.0 - g.density_term + g.tail_term).epsilon(1e-15));
  CHECK(gaussian_truncated_second_moment(0.0) == 0.0);
  CHECK(std::abs(gaussian_truncated_second_moment(8.0) - 1.0) < 1e-12);
  CHECK(gaussian_truncated_second_moment(40.0) == 1.0);
  for (double a : {0.1, 0.5, 1.0, 2.0, 3.0, 5.0}) {
    INFO("a=" << a);
    CHECK(gaussian_truncated_second_moment(a) == doctest::Approx(truncated_by_quadrature(a)).epsilon(1e-10));
  }
  double prev = 0.0;
  for (double a = 0.1; a < 6.0; a += 0.1) {
    const double v = gaussian_truncated_second_moment(a);
    CHECK(v > prev);
    CHECK(v <= 1.0);
    prev = v;
  }
}

TEST_CASE("Kolmogorov-Smirnov statistic") {
  CHECK(ks_statistic(std::vector<double>{0.0}) == 0.5);
  CHECK(ks_statistic(std::vector<double>{-1.0, 1.0}) == doctest::Approx(0.5 - (1.0 - normal_cdf(1.0))));
  std::mt19937_64 gen(3);
  std::student_t_distribution<double> heavy(3.0);
  std::vector<double> v(5000);
  for (auto& x : v) x = heavy(gen);
  CHECK(ks_statistic(v) == doctest::Approx(ks_brute(v)).epsilon(1e-14));
  CHECK(ks_critical_1pct(10'000) == doctest::Approx(0.0163));
}

TEST_CASE("moment accumulator against two-pass formulas") {
  std::mt19937_64 gen(11);
  std::exponential_distribution<double> e(0.5);
  std::vector<double> v(100'000);
  for (auto& x : v) x = 1e6 + e(gen);
  MomentAccumulator acc;
  for (double x : v) acc.add(x);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(v.size());
  CHECK(acc.count() == v.size());
  CHECK(acc.mean() == doctest::Approx(mean).epsilon(1e-14));
  CHECK(acc.variance() == doctest::Approx(m2 / n).epsilon(1e-9));
  CHECK(acc.sample_variance() == doctest::Approx(m2 / (n - 1)).epsilon(1e-9));
  CHECK(acc.central_moment4() == doctest::Approx(m4 / n).epsilon(1e-8));
  CHECK(acc.kurtosis() == doctest::Approx((m4 / n) / ((m2 / n) * (m2 / n))).epsilon(1e-8));
  CHECK(acc.standard_error() == doctest::Approx(std::sqrt(m2 / (n - 1) / n)).epsilon(1e-9));
  // Exponential: excess kurtosis 6.
  CHECK(acc.kurtosis() == doctest::Approx(9.0).epsilon(0.1));
}

}  // TEST_SUITE
