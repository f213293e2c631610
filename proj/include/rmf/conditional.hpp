#pragma once

#include <cstdint>
#include <vector>

#include "rmf/sieve.hpp"
#include "rmf/sums.hpp"

namespace rmf {

/// Largest prime the conditioning engines accept.
inline constexpr std::uint64_t kMaxConditioningPrime = 31;

/// A fixed realisation of eps_p for the primes p <= q, in ascending order.
struct ConditionalSpec {
  std::uint64_t q = 2;
  std::vector<double> epsilon_values;  ///< one value per prime <= q
  // finite mode
  std::uint64_t x = 0;
  int k = 0;
  Selector selector = Selector::Exact;
  // asymptotic mode
  double kbar = 1.0;

  /// Every eps_p = +1.
  static ConditionalSpec all_plus(std::uint64_t q);
  /// Bit i of `pattern` set means the i-th prime gets -1.
  static ConditionalSpec from_pattern(std::uint64_t q, std::uint64_t pattern);
};

/// Primes <= q (q <= 31), ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t q);

/// E(M~^2 | eps_p, p <= q) at finite x, exactly.
///
/// Each n in the summation set splits as n = N n' with N its q-smooth part,
/// so the conditional second moment is sum_{n'} (sum_N f(N))^2 / #S.
/// Supports the exact and at-most selectors.
double conditional_second_moment_finite(const ConditionalSpec& spec, const FactorTable& table);

/// E(M~ | eps_p, p <= q) at finite x: the n' = 1 group over sqrt(#S).
double conditional_mean_finite(const ConditionalSpec& spec, const FactorTable& table);

/// Limit expression
///   1 + 2 prod_{p<=q} (1 + kbar/p)^{-1}
///         sum_N kbar^{omega(N)} f(N)/N sum_{M<N, omega(M)=omega(N)} f(M),
/// N, M running over the squarefree q-smooth integers.
double conditional_second_moment_asymptotic(const ConditionalSpec& spec);

struct Table1Row {
  std::uint64_t q = 0;
  double value = 0.0;           ///< all eps = +1
  double max_over_patterns = 0.0;
  std::uint64_t patterns = 0;   ///< 2^{pi(q)}
};

/// Asymptotic conditional second moments at the given kbar for each q.
/// With scan_patterns every sign pattern is evaluated and the maximum kept.
std::vector<Table1Row> table1(const std::vector<std::uint64_t>& q_list, double kbar, bool scan_patterns = true);

/// E max{V - threshold, 0} over the uniform sign patterns of eps_p, p <= q,
/// with V the asymptotic conditional second moment.
struct ExcessOverPatterns {
  double mean_excess = 0.0;
  std::uint64_t patterns_above = 0;
  std::uint64_t patterns = 0;
};
ExcessOverPatterns conditional_excess(std::uint64_t q, double kbar, double threshold);

}  // namespace rmf
