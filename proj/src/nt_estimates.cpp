#include "rmf/nt_estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rmf/errors.hpp"
#include "rmf/sums.hpp"

namespace rmf {

namespace {

void check_range(const FactorTable& table, std::uint64_t x_min, std::uint64_t x_max) {
  if (x_min > x_max) throw InvalidArgument("empty scan range");
  if (x_max > table.limit()) throw InvalidArgument("scan range exceeds factor table");
}

}  // namespace

AsymptoticParams params(std::uint64_t x, int k) {
  if (k < 1) throw DomainError("L(k,x) needs k >= 1");
  if (x < 3) throw DomainError("L(k,x) needs x >= 3");
  AsymptoticParams p;
  p.x = x;
  p.k = k;
  const double kk = static_cast<double>(k);
  p.L = std::log(std::log(static_cast<double>(x))) - std::log(kk) - std::log(std::log(kk + 1.0));
  if (!(p.L > 0.0)) {
    throw DomainError("L(k,x) = " + std::to_string(p.L) + " <= 0 for x=" + std::to_string(x) +
                      ", k=" + std::to_string(k));
  }
  p.kbar = kk / p.L;
  return p;
}

int k_for_kbar(std::uint64_t x, double target) {
  int best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 64; ++k) {
    double kbar = 0.0;
    try {
      kbar = params(x, k).kbar;
    } catch (const DomainError&) {
      break;
    }
    if (std::abs(kbar - target) < best_gap) {
      best_gap = std::abs(kbar - target);
      best = k;
    }
  }
  if (best == 0) throw DomainError("no k with L(k,x) > 0 for x=" + std::to_string(x));
  return best;
}

BoundCheck hardy_ramanujan_check(const FactorTable& table, std::uint64_t x_min, std::uint64_t x_max, double B,
                                 double configured_A) {
  check_range(table, std::max<std::uint64_t>(x_min, 2), x_max);
  x_min = std::max<std::uint64_t>(x_min, 2);
  BoundCheck c;
  c.name = "hardy-ramanujan";
  c.direction = "upper";
  c.x_min = x_min;
  c.x_max = x_max;
  c.k_min = 1;
  c.configured_constant = configured_A;
  c.extra.emplace_back("B", B);

  std::vector<std::uint64_t> counts(64, 0);
  for (std::uint64_t n = 2; n < x_min; ++n) ++counts[table.omega_unchecked(n)];
  for (std::uint64_t x = x_min; x <= x_max; ++x) {
    ++counts[table.omega_unchecked(x)];
    const double xd = static_cast<double>(x);
    const double lx = std::log(xd);
    const double base = std::log(lx) + B;
    double bound = xd / lx;  // k = 1
    for (int k = 1; k < 64 && counts[k] > 0; ++k) {
      const double ratio = static_cast<double>(counts[k]) / bound;
      if (ratio > c.observed_constant) {
        c.observed_constant = ratio;
        c.worst_x = x;
        c.worst_k = k;
      }
      c.k_max = std::max(c.k_max, k);
      ++c.points;
      bound *= base / k;
    }
  }
  c.pass = c.observed_constant <= configured_A;
  return c;
}

BoundCheck sathe_selberg_check(const FactorTable& table, std::uint64_t x_min, std::uint64_t x_max,
                               double configured_delta) {
  // log log x >= 1 needs x >= e^e.
  x_min = std::max<std::uint64_t>(x_min, 16);
  check_range(table, x_min, x_max);
  BoundCheck c;
  c.name = "sathe-selberg";
  c.direction = "lower";
  c.x_min = x_min;
  c.x_max = x_max;
  c.k_min = 1;
  c.configured_constant = configured_delta;
  c.observed_constant = std::numeric_limits<double>::infinity();

  std::vector<std::uint64_t> counts(64, 0);
  for (std::uint64_t n = 2; n < x_min; ++n) {
    if (table.omega_unchecked(n) == table.big_omega_unchecked(n)) ++counts[table.omega_unchecked(n)];
  }
  for (std::uint64_t x = x_min; x <= x_max; ++x) {
    if (table.omega_unchecked(x) == table.big_omega_unchecked(x)) ++counts[table.omega_unchecked(x)];
    const double xd = static_cast<double>(x);
    const double lx = std::log(xd);
    const double llx = std::log(lx);
    double bound = xd / lx;
    for (int k = 1; k <= static_cast<int>(std::floor(llx)); ++k) {
      const double ratio = static_cast<double>(counts[k]) / bound;
      if (ratio < c.observed_constant) {
        c.observed_constant = ratio;
        c.worst_x = x;
        c.worst_k = k;
      }
      c.k_max = std::max(c.k_max, k);
      ++c.points;
      bound *= llx / k;
    }
  }
  c.pass = c.observed_constant >= configured_delta && c.observed_constant > 0.0;
  return c;
}

LocalRatio local_ratio_check(const FactorTable& table, std::uint64_t x, int k) {
  if (x > table.limit()) throw InvalidArgument("local ratio: x exceeds factor table");
  const auto p = params(x, k);
  const auto lo = count_squarefree_with_k(x, k, table);
  if (lo == 0) throw DomainError("local ratio: #S_{k,x} = 0");
  LocalRatio r;
  r.x = x;
  r.k = k;
  r.L = p.L;
  r.observed = static_cast<double>(count_squarefree_with_k(x, k + 1, table)) / static_cast<double>(lo);
  r.predicted = p.L / k;
  r.relative_deviation = r.observed / r.predicted - 1.0;
  return r;
}

LocalRatio local_scaling_check(const FactorTable& table, std::uint64_t x, int k, double lambda) {
  if (!(lambda >= 1.0)) throw InvalidArgument("scaling factor must be >= 1");
  const auto big = static_cast<std::uint64_t>(std::floor(lambda * static_cast<double>(x)));
  if (big > table.limit()) throw InvalidArgument("local scaling: lambda x exceeds factor table");
  const auto p = params(x, k);
  const auto lo = count_squarefree_with_k(x, k, table);
  if (lo == 0) throw DomainError("local scaling: #S_{k,x} = 0");
  LocalRatio r;
  r.x = x;
  r.k = k;
  r.L = p.L;
  r.observed = static_cast<double>(count_squarefree_with_k(big, k, table)) / static_cast<double>(lo);
  r.predicted = lambda * std::pow(1.0 + std::log(lambda) / std::log(static_cast<double>(x)), p.kbar - 1.0);
  r.relative_deviation = r.observed / r.predicted - 1.0;
  return r;
}

namespace {

double log_G_truncated(double z, std::span<const std::uint32_t> primes) {
  CompensatedSum s;
  s.add(-std::lgamma(z + 1.0));
  for (auto p : primes) {
    const double pd = static_cast<double>(p);
    s.add(std::log1p(z / pd) + z * std::log1p(-1.0 / pd));
  }
  return s.value();
}

std::span<const std::uint32_t> primes_to(const FactorTable& table, std::uint64_t cutoff) {
  if (cutoff > table.limit()) throw InvalidArgument("Euler product cutoff exceeds factor table");
  return table.primes().first(table.prime_count(cutoff));
}

}  // namespace

EulerProductValue G_function(double z, const FactorTable& table, std::uint64_t cutoff) {
  if (!(z >= 0.0)) throw InvalidArgument("G(z) needs z >= 0");
  if (cutoff < 1000) throw InvalidArgument("G(z) needs a prime cutoff >= 1000");
  const auto primes = primes_to(table, cutoff);
  EulerProductValue g;
  g.cutoff = cutoff;
  g.value = std::exp(log_G_truncated(z, primes));
  const double c = static_cast<double>(cutoff);
  const double log_width = (z * z + z) / (c * std::log(c));
  g.half_width = g.value * std::expm1(log_width);
  return g;
}

double G_log_derivative(double z, const FactorTable& table, std::uint64_t cutoff, double h) {
  if (!(z > h)) throw InvalidArgument("log-derivative needs z > h");
  const auto primes = primes_to(table, cutoff);
  const double up = std::log(z + h) + log_G_truncated(z + h, primes);
  const double down = std::log(z - h) + log_G_truncated(z - h, primes);
  return (up - down) / (2.0 * h);
}

ExcludedPrimeDensity excluded_prime_density_check(const FactorTable& table, std::uint64_t x, int k,
                                                  const std::vector<std::uint64_t>& excluded,
                                                  std::uint64_t g_cutoff) {
  if (excluded.size() > 8) throw InvalidArgument("at most 8 excluded primes");
  if (x > table.limit()) throw InvalidArgument("excluded-prime density: x exceeds factor table");
  for (auto p : excluded) {
    if (!table.is_prime(p)) throw InvalidArgument("excluded value " + std::to_string(p) + " is not prime");
  }
  const auto par = params(x, k);
  ExcludedPrimeDensity d;
  d.x = x;
  d.k = k;
  d.excluded = excluded;
  d.kbar = par.kbar;

  CountQuery q;
  q.x = x;
  q.k = k;
  q.mode = CountMode::SquarefreeExact;
  q.excluded_primes = excluded;
  d.observed = count(q, table);

  d.euler_factor = 1.0;
  for (auto p : excluded) d.euler_factor /= 1.0 + par.kbar / static_cast<double>(p);
  const double xd = static_cast<double>(x);
  const double lx = std::log(xd);
  const double main = std::exp(std::log(xd) + (k - 1) * std::log(std::log(lx)) - std::lgamma(k) - std::log(lx));
  d.model = G_function(par.kbar, table, std::min(g_cutoff, table.limit())).value * d.euler_factor * main;
  d.ratio = static_cast<double>(d.observed) / d.model;
  return d;
}

std::vector<BoundCheck> chebychev_mertens_check(const FactorTable& table, std::uint64_t y_max, std::uint64_t q_max,
                                                const std::vector<int>& R_values,
                                                const CalibratedConstants& constants) {
  check_range(table, 2, std::max(y_max, q_max));
  BoundCheck lower;
  lower.name = "chebychev-lower";
  lower.direction = "upper";  // the scan finds the largest constant C needed
  lower.x_min = 2;
  lower.x_max = y_max;
  lower.configured_constant = constants.chebychev_lower_C;
  BoundCheck upper = lower;
  upper.name = "chebychev-upper";
  upper.configured_constant = constants.chebychev_upper_C;

  // psi is constant on [n, n+1): the lower bound is tested at the right end
  // with log n, the upper bound at n.
  double psi = 0.0;
  for (std::uint64_t n = 2; n <= y_max; ++n) {
    const std::uint64_t p = table.spf_unchecked(n);
    std::uint64_t m = n;
    while (m % p == 0) m /= p;
    if (m == 1) psi += std::log(static_cast<double>(p));
    const double nd = static_cast<double>(n);
    const double ln = std::log(nd);
    const double need_lower = (0.9212 * (nd + 1.0) - psi) / ln;
    const double need_upper = (psi - 1.1056 * nd) / (ln * ln);
    if (need_lower > lower.observed_constant) {
      lower.observed_constant = need_lower;
      lower.worst_x = n;
    }
    if (need_upper > upper.observed_constant) {
      upper.observed_constant = need_upper;
      upper.worst_x = n;
    }
    ++lower.points;
    ++upper.points;
  }
  lower.pass = lower.observed_constant <= lower.configured_constant;
  upper.pass = upper.observed_constant <= upper.configured_constant;

  BoundCheck product;
  product.name = "mertens-product";
  product.direction = "lower";
  product.x_min = constants.mertens_q_min;
  product.x_max = q_max;
  product.configured_constant = 1.0;
  product.observed_constant = std::numeric_limits<double>::infinity();
  for (int R : R_values) {
    double prod = 1.0;
    double worst = std::numeric_limits<double>::infinity();
    std::uint64_t last_failure = 0;
    for (std::size_t i = 0; i < table.prime_count(q_max); ++i) {
      const double q = table.primes()[i];
      prod /= 1.0 + R / q;
      const double ratio = prod * std::pow(2.0 * std::log(q), R);
      if (ratio < 1.0) last_failure = table.primes()[i];
      if (table.primes()[i] < constants.mertens_q_min) continue;
      worst = std::min(worst, ratio);
      if (ratio < product.observed_constant) {
        product.observed_constant = ratio;
        product.worst_x = static_cast<std::uint64_t>(q);
        product.worst_k = R;
      }
      ++product.points;
    }
    product.extra.emplace_back("min_ratio_R" + std::to_string(R), worst);
    product.extra.emplace_back("last_failing_q_R" + std::to_string(R), static_cast<double>(last_failure));
  }
  product.k_min = R_values.empty() ? 0 : *std::min_element(R_values.begin(), R_values.end());
  product.k_max = R_values.empty() ? 0 : *std::max_element(R_values.begin(), R_values.end());
  product.pass = product.observed_constant >= 1.0;
  return {lower, upper, product};
}

std::uint64_t smooth_count(const FactorTable& table, std::uint64_t y, std::uint64_t B) {
  if (y > table.limit()) throw InvalidArgument("smooth count: y exceeds factor table");
  std::uint64_t c = y >= 1 ? 1 : 0;  // n = 1
  for (std::uint64_t n = 2; n <= y; ++n) c += table.lpf_unchecked(n) <= B ? 1 : 0;
  return c;
}

BoundCheck smooth_count_check(const FactorTable& table, std::uint64_t y_max, double eps, double configured_c) {
  check_range(table, 2, y_max);
  BoundCheck c;
  c.name = "smooth-count";
  c.direction = "upper";
  c.x_min = 2;
  c.x_max = y_max;
  c.configured_constant = configured_c;
  c.extra.emplace_back("eps", eps);

  const double lmax = std::log(static_cast<double>(y_max));
  const auto b_max = static_cast<std::uint64_t>(std::floor(lmax * lmax));
  std::vector<std::uint64_t> by_lpf(b_max + 1, 0);
  std::uint64_t included_up_to = 0;  // current B(y)
  std::uint64_t total = 1;           // n = 1
  std::uint64_t total_at_max = 1;
  for (std::uint64_t y = 2; y <= y_max; ++y) {
    const std::uint64_t p = table.lpf_unchecked(y);
    if (p <= included_up_to) {
      ++total;
    } else if (p <= b_max) {
      ++by_lpf[p];
    }
    const double ly = std::log(static_cast<double>(y));
    const auto b = static_cast<std::uint64_t>(std::floor(ly * ly));
    while (included_up_to < b) total += by_lpf[++included_up_to];
    const double ratio = static_cast<double>(total) / std::pow(static_cast<double>(y), 0.5 + eps);
    if (ratio > c.observed_constant) {
      c.observed_constant = ratio;
      c.worst_x = y;
    }
    ++c.points;
    total_at_max = total;
  }
  const double ly = std::log(static_cast<double>(y_max));
  c.extra.emplace_back("exponent_at_y_max", std::log(static_cast<double>(total_at_max)) / ly);
  c.pass = c.observed_constant <= configured_c;
  return c;
}

}  // namespace rmf
