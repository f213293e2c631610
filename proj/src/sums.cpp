#include "rmf/sums.hpp"

#include "rmf/errors.hpp"

namespace rmf {

std::string to_string(Selector s) {
  switch (s) {
    case Selector::Exact: return "exact";
    case Selector::AtMost: return "at-most";
    case Selector::All: return "all";
  }
  return "?";
}

Selector parse_selector(const std::string& s) {
  if (s == "exact") return Selector::Exact;
  if (s == "at-most") return Selector::AtMost;
  if (s == "all") return Selector::All;
  throw InvalidArgument("unknown selector '" + s + "' (expected exact, at-most, all)");
}

bool SumSpec::contains(std::uint64_t n, const FactorTable& t) const {
  const int w = t.omega_unchecked(n);
  if (t.big_omega_unchecked(n) != w) return false;
  switch (selector) {
    case Selector::Exact:
      if (w != k) return false;
      break;
    case Selector::AtMost:
      if (w > k) return false;
      break;
    case Selector::All:
      break;
  }
  if (largest_prime) return n > 1 && t.lpf_unchecked(n) == *largest_prime;
  return true;
}

namespace {

void check_assignment(std::uint64_t x, const EpsilonAssignment& a, const FactorTable& t) {
  if (x > t.limit()) throw InvalidArgument("sum limit " + std::to_string(x) + " exceeds factor table");
  if (x > a.limit()) throw InvalidArgument("sum limit " + std::to_string(x) + " exceeds assignment limit");
  if (a.values().size() != t.prime_count(a.limit())) {
    throw InvalidArgument("assignment does not match factor table");
  }
}

}  // namespace

double evaluate_f(std::uint64_t n, const EpsilonAssignment& a, const FactorTable& t) {
  if (n < 1 || n > a.limit() || n > t.limit()) {
    throw InvalidArgument("evaluate_f: n=" + std::to_string(n) + " out of range");
  }
  if (!t.squarefree(n)) return 0.0;
  double v = 1.0;
  for (auto p : t.distinct_primes(n)) v *= a.at_index(t.prime_index(p));
  return v;
}

std::vector<double> f_values(std::uint64_t x, const EpsilonAssignment& a, const FactorTable& t) {
  check_assignment(x, a, t);
  std::vector<double> f(x + 1, 0.0);
  if (x >= 1) f[1] = 1.0;
  const auto primes = t.primes();
  const auto values = a.values();
  for (std::size_t i = 0; i < values.size() && primes[i] <= x; ++i) f[primes[i]] = values[i];
  for (std::uint64_t n = 4; n <= x; ++n) {
    const std::uint64_t p = t.spf_unchecked(n);
    if (p == n) continue;
    const std::uint64_t m = n / p;
    f[n] = t.spf_unchecked(m) == p ? 0.0 : f[p] * f[m];
  }
  return f;
}

double sum_M(const SumSpec& spec, const EpsilonAssignment& a, const FactorTable& t) {
  if (spec.k < 0) throw InvalidArgument("sum_M: k must be >= 0");
  if (spec.largest_prime && !t.is_prime(*spec.largest_prime)) {
    throw InvalidArgument("sum_M: largest-prime restriction must be a prime");
  }
  const auto f = f_values(spec.x, a, t);
  CompensatedSum s;
  for (std::uint64_t n = 1; n <= spec.x; ++n) {
    if (f[n] != 0.0 && spec.contains(n, t)) s.add(f[n]);
  }
  return s.value();
}

std::vector<Increment> martingale_increments(std::uint64_t x, int k, const EpsilonAssignment& a,
                                             const FactorTable& t) {
  if (k < 1) throw InvalidArgument("martingale increments need k >= 1");
  const auto f = f_values(x, a, t);
  const std::size_t np = t.prime_count(x);
  std::vector<CompensatedSum> acc(np);
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (t.omega_unchecked(n) != k || t.big_omega_unchecked(n) != k) continue;
    acc[t.prime_index(t.lpf_unchecked(n))].add(f[n]);
  }
  std::vector<Increment> out(np);
  for (std::size_t i = 0; i < np; ++i) out[i] = {t.primes()[i], acc[i].value()};
  return out;
}

double sum_increments(std::span<const Increment> increments) {
  CompensatedSum s;
  for (const auto& inc : increments) s.add(inc.value);
  return s.value();
}

ExchangeablePairCheck exchangeable_pair(std::uint64_t x, int k, const EpsilonAssignment& a,
                                        const FactorTable& t) {
  if (k < 1) throw InvalidArgument("exchangeable pair needs k >= 1");
  const auto f = f_values(x, a, t);
  const std::size_t np = t.prime_count(x);
  // through[i] = sum of f(n) over n in S_{k,x} divisible by the i-th prime.
  std::vector<CompensatedSum> through(np);
  CompensatedSum m;
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (t.omega_unchecked(n) != k || t.big_omega_unchecked(n) != k) continue;
    m.add(f[n]);
    for (auto p : t.distinct_primes(n)) through[t.prime_index(p)].add(f[n]);
  }
  ExchangeablePairCheck out;
  out.m = m.value();
  out.prime_count = np;
  out.closed_form = (1.0 - static_cast<double>(k) / static_cast<double>(np)) * out.m;
  // Replacing eps_I by an independent copy and averaging that copy out
  // removes exactly the terms divisible by I.
  CompensatedSum avg;
  for (std::size_t i = 0; i < np; ++i) avg.add(out.m - through[i].value());
  out.direct_average = avg.value() / static_cast<double>(np);
  out.difference = out.closed_form - out.direct_average;
  return out;
}

}  // namespace rmf
