#include "rmf/conditional.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

bool small_prime(std::uint64_t q) {
  if (q < 2) return false;
  for (std::uint64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) return false;
  }
  return true;
}

void check_q(std::uint64_t q) {
  if (!small_prime(q)) throw InvalidArgument("conditioning bound q=" + std::to_string(q) + " is not prime");
  if (q > kMaxConditioningPrime) {
    throw InvalidArgument("conditioning bound q=" + std::to_string(q) + " exceeds " +
                          std::to_string(kMaxConditioningPrime));
  }
}

void check_values(const ConditionalSpec& spec, std::size_t np) {
  if (spec.epsilon_values.size() != np) {
    throw InvalidArgument("conditioning needs " + std::to_string(np) + " epsilon values for q=" +
                          std::to_string(spec.q) + ", got " + std::to_string(spec.epsilon_values.size()));
  }
}

struct SmoothDivisor {
  std::uint64_t n;
  std::uint32_t mask;  ///< bit i: i-th prime divides n
  int omega;
};

// Squarefree q-smooth integers (divisors of the primorial), ascending.
std::vector<SmoothDivisor> smooth_divisors(const std::vector<std::uint64_t>& primes) {
  const std::uint32_t count = 1u << primes.size();
  std::vector<SmoothDivisor> out;
  out.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (mask & (1u << i)) n *= primes[i];
    }
    out.push_back({n, mask, std::popcount(mask)});
  }
  std::sort(out.begin(), out.end(), [](const SmoothDivisor& a, const SmoothDivisor& b) { return a.n < b.n; });
  return out;
}

// The double sum of the limit expression for one sign pattern
// (bit i set: eps of the i-th prime is -1), before the Euler factor.
double double_sum(const std::vector<SmoothDivisor>& divisors, std::size_t np, std::uint32_t pattern, double kbar) {
  std::vector<double> running(np + 1, 0.0);
  double total = 0.0;
  for (const auto& d : divisors) {
    const double f = (std::popcount(d.mask & pattern) & 1) ? -1.0 : 1.0;
    total += std::pow(kbar, d.omega) * f / static_cast<double>(d.n) * running[d.omega];
    running[d.omega] += f;
  }
  return total;
}

double euler_factor(const std::vector<std::uint64_t>& primes, double kbar) {
  double prod = 1.0;
  for (auto p : primes) prod /= 1.0 + kbar / static_cast<double>(p);
  return prod;
}

struct SplitSums {
  std::vector<double> groups;  ///< indexed by the rough part n'
  std::uint64_t set_size = 0;
};

SplitSums split_by_rough_part(const ConditionalSpec& spec, const FactorTable& table) {
  check_q(spec.q);
  if (spec.x < 1 || spec.x > table.limit()) throw InvalidArgument("conditioning limit outside factor table");
  if (spec.k < 0) throw InvalidArgument("conditioning needs k >= 0");
  if (spec.selector == Selector::All) throw InvalidArgument("conditioning supports the exact and at-most selectors");
  const auto primes = primes_up_to(spec.q);
  check_values(spec, primes.size());

  CountQuery query;
  query.x = spec.x;
  query.k = spec.k;
  query.mode = spec.selector == Selector::Exact ? CountMode::SquarefreeExact : CountMode::SquarefreeAtMost;

  SplitSums out;
  out.groups.assign(spec.x + 1, 0.0);
  for (auto n : enumerate(query, table)) {
    std::uint64_t rough = n;
    double f = 1.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (rough % primes[i] == 0) {
        rough /= primes[i];
        f *= spec.epsilon_values[i];
      }
    }
    out.groups[rough] += f;
    ++out.set_size;
  }
  return out;
}

}  // namespace

ConditionalSpec ConditionalSpec::all_plus(std::uint64_t q) { return from_pattern(q, 0); }

ConditionalSpec ConditionalSpec::from_pattern(std::uint64_t q, std::uint64_t pattern) {
  ConditionalSpec s;
  s.q = q;
  const auto np = primes_up_to(q).size();
  for (std::size_t i = 0; i < np; ++i) s.epsilon_values.push_back((pattern >> i) & 1 ? -1.0 : 1.0);
  return s;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t q) {
  if (q > kMaxConditioningPrime) throw InvalidArgument("conditioning bound exceeds " + std::to_string(kMaxConditioningPrime));
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p <= q; ++p) {
    if (small_prime(p)) out.push_back(p);
  }
  return out;
}

double conditional_second_moment_finite(const ConditionalSpec& spec, const FactorTable& table) {
  const auto s = split_by_rough_part(spec, table);
  if (s.set_size == 0) throw DomainError("conditional second moment undefined: empty summation set");
  CompensatedSum sum;
  for (double g : s.groups) {
    if (g != 0.0) sum.add(g * g);
  }
  return sum.value() / static_cast<double>(s.set_size);
}

double conditional_mean_finite(const ConditionalSpec& spec, const FactorTable& table) {
  const auto s = split_by_rough_part(spec, table);
  if (s.set_size == 0) throw DomainError("conditional mean undefined: empty summation set");
  return s.groups[1] / std::sqrt(static_cast<double>(s.set_size));
}

double conditional_second_moment_asymptotic(const ConditionalSpec& spec) {
  check_q(spec.q);
  if (!(spec.kbar > 0.0)) throw InvalidArgument("asymptotic conditioning needs kbar > 0");
  const auto primes = primes_up_to(spec.q);
  check_values(spec, primes.size());

  const auto divisors = smooth_divisors(primes);
  std::vector<double> running(primes.size() + 1, 0.0);
  double total = 0.0;
  for (const auto& d : divisors) {
    double f = 1.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (d.mask & (1u << i)) f *= spec.epsilon_values[i];
    }
    total += std::pow(spec.kbar, d.omega) * f / static_cast<double>(d.n) * running[d.omega];
    running[d.omega] += f;
  }
  return 1.0 + 2.0 * euler_factor(primes, spec.kbar) * total;
}

std::vector<Table1Row> table1(const std::vector<std::uint64_t>& q_list, double kbar, bool scan_patterns) {
  if (!(kbar > 0.0)) throw InvalidArgument("table needs kbar > 0");
  std::vector<Table1Row> rows;
  for (auto q : q_list) {
    check_q(q);
    const auto primes = primes_up_to(q);
    const auto divisors = smooth_divisors(primes);
    const double factor = 2.0 * euler_factor(primes, kbar);
    Table1Row row;
    row.q = q;
    row.patterns = std::uint64_t{1} << primes.size();
    row.value = 1.0 + factor * double_sum(divisors, primes.size(), 0, kbar);
    row.max_over_patterns = row.value;
    if (scan_patterns) {
      for (std::uint32_t pattern = 1; pattern < row.patterns; ++pattern) {
        row.max_over_patterns =
            std::max(row.max_over_patterns, 1.0 + factor * double_sum(divisors, primes.size(), pattern, kbar));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

ExcessOverPatterns conditional_excess(std::uint64_t q, double kbar, double threshold) {
  check_q(q);
  if (!(kbar > 0.0)) throw InvalidArgument("conditional excess needs kbar > 0");
  const auto primes = primes_up_to(q);
  const auto divisors = smooth_divisors(primes);
  const double factor = 2.0 * euler_factor(primes, kbar);
  ExcessOverPatterns out;
  out.patterns = std::uint64_t{1} << primes.size();
  CompensatedSum sum;
  for (std::uint32_t pattern = 0; pattern < out.patterns; ++pattern) {
    const double v = 1.0 + factor * double_sum(divisors, primes.size(), pattern, kbar);
    if (v > threshold) {
      ++out.patterns_above;
      sum.add(v - threshold);
    }
  }
  out.mean_excess = sum.value() / static_cast<double>(out.patterns);
  return out;
}

}  // namespace rmf
