#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmf/sieve.hpp"
#include "rmf/sums.hpp"

namespace rmf {

using u128 = unsigned __int128;

std::string to_string_u128(u128 v);
/// Exact v as a double (correctly rounded).
double to_double(u128 v);

/// Limits for the pair-enumeration engine.
struct MomentBudget {
  std::uint64_t max_set_size = 200'000;           ///< refuse larger #S_{k,x} unless forced
  std::uint64_t max_kernel_entries = 200'000'000; ///< stored kernels of non-coprime pairs
  bool force = false;                             ///< ignore max_set_size
};

struct Stratum {
  int w = 0;        ///< kernel m has 2W distinct primes
  u128 value = 0;
};

/// Exact moment data for M^(k)(x) under Rademacher epsilons.
///
/// Two stratifications by W = omega(m)/2 of the kernel m = s(ab) are kept:
///  - kernel_strata: sum of c_m^2 with c_m = #{(a,b) in S_{k,x}^2 : s(ab) = m};
///    these partition the fourth moment E M^4 = sum_m c_m^2.
///  - cross_terms_by_w: sum over primes p, q of
///    #{(a,b) in S_{p,k,x}^2 : s(ab) = m} * #{(c,d) in S_{q,k,x}^2 : s(cd) = m},
///    i.e. pairs restricted to a common largest prime factor. W = 0 is the
///    m = 1 term (#S_{k,x})^2.
struct MomentReport {
  std::uint64_t x = 0;
  int k = 0;
  std::uint64_t second_moment = 0;  ///< #S_{k,x}
  u128 fourth_moment = 0;
  double m4_excess = 0.0;           ///< E M~^4 - 3; NaN when second_moment == 0
  std::vector<Stratum> kernel_strata;
  std::vector<Stratum> cross_terms_by_w;
  u128 cross_terms_total = 0;       ///< sum_{p,q} E M_p^2 M_q^2
  u128 increment_fourth_sum = 0;    ///< sum_p E M_p^4
  u128 m1_term = 0;                 ///< (#S_{k,x})^2
  std::uint64_t odd_kernel_pairs = 0;  ///< pairs whose kernel has odd omega; always 0
  std::uint64_t pairs_examined = 0;
};

/// E M^2 = size of the summation set (model-independent under E eps^2 = 1).
std::uint64_t second_moment(std::uint64_t x, int k, Selector selector, const FactorTable& table);

/// Full report; Rademacher fourth moment via kernel pair counting.
MomentReport moment_report(std::uint64_t x, int k, const FactorTable& table,
                           const MomentBudget& budget = {});

/// #{(a,b,c,d) in S_{k,x}^4 : abcd is a square} = E M^(k)(x)^4 (Rademacher).
u128 fourth_moment_exact_rademacher(std::uint64_t x, int k, const FactorTable& table,
                                    const MomentBudget& budget = {});

/// E M~^4 - 3. Throws DomainError when E M^2 = 0.
double m4_excess(std::uint64_t x, int k, const FactorTable& table, const MomentBudget& budget = {});

/// 4 * sum_{r prime <= x} sum_{s < r prime} #{t in S_{k-1,x/r} : P(t) > r, r !| t, s !| t}^2.
/// With require_large_factor = false the P(t) > r condition is dropped,
/// which gives the W = 1 kernel stratum instead of the W = 1 cross term.
u128 w1_term_explicit(std::uint64_t x, int k, const FactorTable& table, bool require_large_factor = true);

}  // namespace rmf
