#include "rmf/moments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <tuple>

#include "rmf/errors.hpp"

namespace rmf {

std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double to_double(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  if (hi == 0) return static_cast<double>(lo);
  return std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
}

std::uint64_t second_moment(std::uint64_t x, int k, Selector selector, const FactorTable& table) {
  CountQuery q;
  q.x = x;
  q.k = k;
  switch (selector) {
    case Selector::Exact: q.mode = CountMode::SquarefreeExact; break;
    case Selector::AtMost: q.mode = CountMode::SquarefreeAtMost; break;
    case Selector::All:
      q.mode = CountMode::SquarefreeAtMost;
      q.k = 64;
      break;
  }
  return count(q, table);
}

namespace {

// Members of S_{k,x} with their prime factors, ascending.
struct PairSet {
  int k = 0;
  std::vector<std::uint64_t> members;
  std::vector<std::uint32_t> factors;  // k per member

  const std::uint32_t* primes_of(std::size_t i) const { return factors.data() + i * k; }
};

PairSet collect(std::uint64_t x, int k, const FactorTable& t) {
  CountQuery q;
  q.x = x;
  q.k = k;
  q.mode = CountMode::SquarefreeExact;
  PairSet s;
  s.k = k;
  s.members = enumerate(q, t);
  s.factors.reserve(s.members.size() * static_cast<std::size_t>(k));
  for (auto n : s.members) {
    auto ps = t.distinct_primes(n);
    s.factors.insert(s.factors.end(), ps.begin(), ps.end());
  }
  return s;
}

struct Overlap {
  int shared = 0;
  int sym_diff = 0;
  std::uint32_t smallest_shared = 0;
  std::uint64_t kernel = 1;
};

Overlap overlap(const std::uint32_t* a, const std::uint32_t* b, int k) {
  Overlap o;
  int i = 0, j = 0;
  while (i < k || j < k) {
    if (j == k || (i < k && a[i] < b[j])) {
      o.kernel *= a[i++];
      ++o.sym_diff;
    } else if (i == k || b[j] < a[i]) {
      o.kernel *= b[j++];
      ++o.sym_diff;
    } else {
      if (o.shared++ == 0) o.smallest_shared = a[i];
      ++i;
      ++j;
    }
  }
  return o;
}

bool disjoint(const std::uint32_t* a, const std::uint32_t* b, int k) {
  int i = 0, j = 0;
  while (i < k && j < k) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return true;
}

// Unordered splits of the 2k primes of a*b (a, b coprime) into two k-prime
// halves that are both <= x.
std::uint64_t split_count(const std::uint32_t* a, const std::uint32_t* b, int k, std::uint64_t x) {
  std::uint32_t all[64];
  std::merge(a, a + k, b, b + k, all);
  const int n = 2 * k;
  std::uint64_t splits = 0;
  // Fix all[0] in the first half so each unordered split is seen once.
  const std::uint32_t rest_masks = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask < rest_masks; ++mask) {
    if (std::popcount(mask) != k - 1) continue;
    const std::uint32_t first = (mask << 1) | 1u;
    u128 d = 1, e = 1;
    for (int i = 0; i < n; ++i) {
      if (first & (1u << i)) {
        d *= all[i];
      } else {
        e *= all[i];
      }
    }
    if (d <= x && e <= x) ++splits;
  }
  return splits;
}

// Sum over runs of equal keys of (2 * run)^2.
template <typename It, typename Eq>
u128 sum_squared_runs(It begin, It end, Eq same) {
  u128 total = 0;
  for (It it = begin; it != end;) {
    It run_end = it + 1;
    while (run_end != end && same(*it, *run_end)) ++run_end;
    const u128 c = 2 * static_cast<u128>(run_end - it);
    total += c * c;
    it = run_end;
  }
  return total;
}

struct SamePrimeEntry {
  std::uint32_t largest;
  int w;
  std::uint64_t kernel;
};

}  // namespace

MomentReport moment_report(std::uint64_t x, int k, const FactorTable& table, const MomentBudget& budget) {
  if (k < 0) throw InvalidArgument("moment report needs k >= 0");
  if (x > table.limit()) throw InvalidArgument("moment report: x exceeds table limit");
  if (x >= (std::uint64_t{1} << 32)) throw InvalidArgument("moment report: kernels need x < 2^32");

  MomentReport r;
  r.x = x;
  r.k = k;
  r.kernel_strata.resize(static_cast<std::size_t>(k) + 1);
  r.cross_terms_by_w.resize(static_cast<std::size_t>(k) + 1);
  for (int w = 0; w <= k; ++w) r.kernel_strata[w].w = r.cross_terms_by_w[w].w = w;

  const std::uint64_t set_size = second_moment(x, k, Selector::Exact, table);
  r.second_moment = set_size;
  if (!budget.force && set_size > budget.max_set_size) {
    throw ResourceError("#S_{k,x} = " + std::to_string(set_size) + " exceeds the pair-enumeration budget of " +
                            std::to_string(budget.max_set_size) + " (use force to override)",
                        set_size);
  }

  const u128 n = set_size;
  r.m1_term = n * n;
  r.kernel_strata[0].value = n * n;
  r.cross_terms_by_w[0].value = n * n;
  if (k == 0 || set_size == 0) {
    r.fourth_moment = n * n;
    r.cross_terms_total = n * n;
    r.increment_fourth_sum = n * n;  // k = 0: the single term n = 1
    if (set_size == 0) r.increment_fourth_sum = 0;
    r.m4_excess = set_size == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : to_double(r.fourth_moment) / to_double(n * n) - 3.0;
    return r;
  }

  const PairSet s = collect(x, k, table);

  // Non-coprime pairs, found through the members sharing each prime; a pair
  // is handled at its smallest shared prime only.
  std::vector<std::vector<std::uint32_t>> by_prime(table.prime_count(x));
  for (std::size_t i = 0; i < s.members.size(); ++i) {
    const auto* ps = s.primes_of(i);
    for (int j = 0; j < k; ++j) by_prime[table.prime_index(ps[j])].push_back(static_cast<std::uint32_t>(i));
  }
  u128 estimate = 0;
  for (const auto& l : by_prime) estimate += static_cast<u128>(l.size()) * (l.size() > 0 ? l.size() - 1 : 0) / 2;
  if (estimate > budget.max_kernel_entries) {
    throw ResourceError("non-coprime pair kernels (" + to_string_u128(estimate) + ") exceed budget of " +
                            std::to_string(budget.max_kernel_entries),
                        static_cast<std::uint64_t>(std::min<u128>(estimate, std::numeric_limits<std::uint64_t>::max())));
  }

  std::vector<std::vector<std::uint64_t>> kernels(static_cast<std::size_t>(k) + 1);
  std::vector<SamePrimeEntry> same_p;
  std::uint64_t non_coprime_pairs = 0;
  for (std::size_t pi = 0; pi < by_prime.size(); ++pi) {
    const auto& l = by_prime[pi];
    const std::uint32_t p = table.primes()[pi];
    for (std::size_t u = 0; u < l.size(); ++u) {
      const auto* a = s.primes_of(l[u]);
      for (std::size_t v = u + 1; v < l.size(); ++v) {
        const auto* b = s.primes_of(l[v]);
        const Overlap o = overlap(a, b, k);
        ++r.pairs_examined;
        if (o.smallest_shared != p) continue;
        ++non_coprime_pairs;
        if (o.sym_diff % 2 != 0) {
          ++r.odd_kernel_pairs;
          continue;
        }
        const int w = o.sym_diff / 2;
        kernels[w].push_back(o.kernel);
        if (a[k - 1] == b[k - 1]) same_p.push_back({a[k - 1], w, o.kernel});
      }
    }
  }

  for (int w = 1; w < k; ++w) {
    auto& v = kernels[w];
    std::sort(v.begin(), v.end());
    r.kernel_strata[w].value = sum_squared_runs(v.begin(), v.end(), std::equal_to<>{});
  }

  // W = k: coprime pairs. Their kernels have 2k primes and every pair with
  // that kernel is another split of the same prime set, so
  // sum_m u_m^2 = sum over coprime pairs of u_{m(pair)}.
  u128 coprime_weight = 0;
  const u128 all_pairs = n * (n - 1) / 2;
  if (k == 1) {
    // A two-prime kernel has exactly one split.
    coprime_weight = all_pairs - non_coprime_pairs;
  } else if (k == 2) {
    for (std::size_t i = 0; i < s.members.size(); ++i) {
      const std::uint64_t a0 = s.primes_of(i)[0], a1 = s.primes_of(i)[1];
      for (std::size_t j = i + 1; j < s.members.size(); ++j) {
        std::uint64_t q[4] = {a0, a1, s.primes_of(j)[0], s.primes_of(j)[1]};
        if (q[2] == a0 || q[2] == a1 || q[3] == a0 || q[3] == a1) continue;
        if (q[0] > q[2]) std::swap(q[0], q[2]);
        if (q[1] > q[3]) std::swap(q[1], q[3]);
        if (q[0] > q[1]) std::swap(q[0], q[1]);
        if (q[2] > q[3]) std::swap(q[2], q[3]);
        if (q[1] > q[2]) std::swap(q[1], q[2]);
        coprime_weight += (q[0] * q[1] <= x && q[2] * q[3] <= x) + (q[0] * q[2] <= x && q[1] * q[3] <= x) +
                          (q[0] * q[3] <= x && q[1] * q[2] <= x);
      }
    }
    r.pairs_examined += static_cast<std::uint64_t>(all_pairs);
  } else {
    for (std::size_t i = 0; i < s.members.size(); ++i) {
      const auto* a = s.primes_of(i);
      for (std::size_t j = i + 1; j < s.members.size(); ++j) {
        const auto* b = s.primes_of(j);
        ++r.pairs_examined;
        if (!disjoint(a, b, k)) continue;
        coprime_weight += split_count(a, b, k, x);
      }
    }
  }
  r.kernel_strata[k].value = 4 * coprime_weight;

  r.fourth_moment = 0;
  for (const auto& st : r.kernel_strata) r.fourth_moment += st.value;

  // Same-largest-prime family.
  std::vector<std::uint64_t> per_prime(table.prime_count(x), 0);
  for (std::size_t i = 0; i < s.members.size(); ++i) ++per_prime[table.prime_index(s.primes_of(i)[k - 1])];
  u128 inc = 0;
  for (auto c : per_prime) inc += static_cast<u128>(c) * c;
  std::sort(same_p.begin(), same_p.end(), [](const SamePrimeEntry& a, const SamePrimeEntry& b) {
    return std::tie(a.largest, a.kernel) < std::tie(b.largest, b.kernel);
  });
  inc += sum_squared_runs(same_p.begin(), same_p.end(), [](const SamePrimeEntry& a, const SamePrimeEntry& b) {
    return a.largest == b.largest && a.kernel == b.kernel;
  });
  r.increment_fourth_sum = inc;

  std::sort(same_p.begin(), same_p.end(), [](const SamePrimeEntry& a, const SamePrimeEntry& b) {
    return std::tie(a.w, a.kernel) < std::tie(b.w, b.kernel);
  });
  for (auto it = same_p.begin(); it != same_p.end();) {
    auto end = std::find_if(it, same_p.end(), [w = it->w](const SamePrimeEntry& e) { return e.w != w; });
    r.cross_terms_by_w[it->w].value =
        sum_squared_runs(it, end, [](const SamePrimeEntry& a, const SamePrimeEntry& b) { return a.kernel == b.kernel; });
    it = end;
  }
  r.cross_terms_total = 0;
  for (const auto& st : r.cross_terms_by_w) r.cross_terms_total += st.value;

  const u128 denom = n * n;
  const bool above = r.fourth_moment >= 3 * denom;
  const u128 diff = above ? r.fourth_moment - 3 * denom : 3 * denom - r.fourth_moment;
  r.m4_excess = (above ? 1.0 : -1.0) * (to_double(diff) / to_double(denom));
  return r;
}

u128 fourth_moment_exact_rademacher(std::uint64_t x, int k, const FactorTable& table, const MomentBudget& budget) {
  return moment_report(x, k, table, budget).fourth_moment;
}

double m4_excess(std::uint64_t x, int k, const FactorTable& table, const MomentBudget& budget) {
  if (second_moment(x, k, Selector::Exact, table) == 0) {
    throw DomainError("m4 excess undefined: E M^(k)(x)^2 = 0 for x=" + std::to_string(x) +
                      ", k=" + std::to_string(k));
  }
  return moment_report(x, k, table, budget).m4_excess;
}

u128 w1_term_explicit(std::uint64_t x, int k, const FactorTable& table, bool require_large_factor) {
  if (k < 2) throw InvalidArgument("the W = 1 term needs k >= 2");
  if (x > table.limit()) throw InvalidArgument("w1 term: x exceeds table limit");
  const auto primes = table.primes();
  const std::size_t np = table.prime_count(x);
  u128 total = 0;
  std::vector<std::uint64_t> divisible(np, 0);
  for (std::size_t ri = 0; ri < np; ++ri) {
    const std::uint64_t r = primes[ri];
    CountQuery q;
    q.x = x / r;
    q.k = k - 1;
    q.mode = CountMode::SquarefreeExact;
    if (require_large_factor) q.largest = LargestPrimeConstraint::above(r);
    if (q.x < 2 && k - 1 > 0) continue;
    // #S_{k-1, x/r} with r !| t; then remove, for each s < r, those with s | t.
    std::uint64_t base = 0;
    std::fill(divisible.begin(), divisible.begin() + static_cast<std::ptrdiff_t>(ri), 0);
    for (auto t : enumerate(q, table)) {
      if (t % r == 0) continue;
      ++base;
      for (auto sp : table.distinct_primes(t)) {
        if (sp < r) ++divisible[table.prime_index(sp)];
      }
    }
    if (base == 0) continue;
    for (std::size_t si = 0; si < ri; ++si) {
      const u128 c = base - divisible[si];
      total += c * c;
    }
  }
  return 4 * total;
}

}  // namespace rmf
