#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "oracles.hpp"
#include "rmf/errors.hpp"
#include "rmf/moments.hpp"

using namespace rmf;

namespace {

const FactorTable& table() {
  static const FactorTable t = FactorTable::build(1'000'000);
  return t;
}

u128 stratum(const std::vector<Stratum>& s, int w) {
  for (const auto& e : s)
    if (e.w == w) return e.value;
  return 0;
}

u128 total(const std::vector<Stratum>& s) {
  u128 v = 0;
  for (const auto& e : s) v += e.value;
  return v;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("second moment is the set size") {
  const auto& t = table();
  CHECK(second_moment(10, 1, Selector::Exact, t) == 4);
  CHECK(second_moment(10, 0, Selector::Exact, t) == 1);
  CHECK(second_moment(30, 3, Selector::Exact, t) == 1);
  CHECK(fourth_moment_exact_rademacher(10, 4, t) == 0);
  for (int k = 0; k <= 4; ++k) {
    CHECK(second_moment(3000, k, Selector::Exact, t) == oracle::squarefree_set(3000, k).size());
    CHECK(second_moment(3000, k, Selector::AtMost, t) == oracle::squarefree_set(3000, k, true).size());
  }
  CHECK(second_moment(3000, 0, Selector::All, t) == oracle::squarefree_set(3000, 99, true).size());
}

TEST_CASE("u128 helpers") {
  CHECK(to_string_u128(0) == "0");
  const u128 big = static_cast<u128>(1) << 100;
  CHECK(to_string_u128(big) == "1267650600228229401496703205376");
  CHECK(to_double(big) == std::ldexp(1.0, 100));
}

TEST_CASE("exhaustive sign-pattern oracle, x <= 30") {
  const auto& t = table();
  for (std::uint64_t x = 2; x <= 30; ++x) {
    const auto primes = oracle::primes_to(x);
    const std::uint64_t patterns = std::uint64_t{1} << primes.size();
    for (int k = 1; k <= 3; ++k) {
      const auto set = oracle::squarefree_set(x, k);
      if (set.empty()) continue;
      long long s2 = 0, s4 = 0, cross = 0, inc4 = 0;
      for (std::uint64_t pat = 0; pat < patterns; ++pat) {
        long long m = 0;
        std::map<std::uint64_t, long long> by_p;
        for (auto n : set) {
          const auto f = oracle::f_signed(n, primes, pat);
          m += f;
          by_p[oracle::largest_prime(n)] += f;
        }
        s2 += m * m;
        s4 += m * m * m * m;
        long long sq = 0;
        for (auto [p, v] : by_p) {
          sq += v * v;
          inc4 += v * v * v * v;
        }
        cross += sq * sq;
      }
      INFO("x=" << x << " k=" << k);
      REQUIRE(s2 % static_cast<long long>(patterns) == 0);
      REQUIRE(s4 % static_cast<long long>(patterns) == 0);
      const auto r = moment_report(x, k, t);
      CHECK(r.second_moment == static_cast<std::uint64_t>(s2 / static_cast<long long>(patterns)));
      CHECK(r.fourth_moment == static_cast<u128>(s4 / static_cast<long long>(patterns)));
      CHECK(fourth_moment_exact_rademacher(x, k, t) == r.fourth_moment);
      CHECK(r.cross_terms_total == static_cast<u128>(cross / static_cast<long long>(patterns)));
      CHECK(r.increment_fourth_sum == static_cast<u128>(inc4 / static_cast<long long>(patterns)));
    }
  }
}

TEST_CASE("fourth moment equals a brute-force kernel count") {
  const auto& t = table();
  for (int k = 1; k <= 4; ++k) {
    const auto set = oracle::squarefree_set(3000, k);
    std::map<std::uint64_t, u128> c;
    for (auto a : set) {
      for (auto b : set) {
        const auto g = std::gcd(a, b);
        c[a / g * (b / g)] += 1;
      }
    }
    u128 sum = 0;
    for (auto& [m, v] : c) sum += v * v;
    INFO("k=" << k);
    CHECK(fourth_moment_exact_rademacher(3000, k, t) == sum);
  }
}

TEST_CASE("k = 1 closed form") {
  const auto& t = table();
  for (std::uint64_t x : {100ull, 10'000ull, 1'000'000ull}) {
    const u128 p = t.prime_count(x);
    const auto r = moment_report(x, 1, t);
    CHECK(r.fourth_moment == 3 * p * p - 2 * p);
    CHECK(r.m4_excess == -2.0 / static_cast<double>(p));
  }
}

TEST_CASE("strata partition the fourth moment and odd kernels never occur") {
  const auto& t = table();
  for (std::uint64_t x : {50ull, 500ull, 5000ull, 20'000ull, 60'000ull}) {
    for (int k = 1; k <= 5; ++k) {
      if (second_moment(x, k, Selector::Exact, t) > 10'000) continue;
      const auto r = moment_report(x, k, t);
      INFO("x=" << x << " k=" << k);
      CHECK(total(r.kernel_strata) == r.fourth_moment);
      CHECK(total(r.cross_terms_by_w) == r.cross_terms_total);
      CHECK(r.odd_kernel_pairs == 0);
      const u128 n = r.second_moment;
      CHECK(r.m1_term == n * n);
      CHECK(stratum(r.kernel_strata, 0) == n * n);
      CHECK(stratum(r.cross_terms_by_w, 0) == n * n);
      CHECK(r.cross_terms_total <= r.fourth_moment);
    }
  }
}

TEST_CASE("explicit W = 1 formula matches both stratifications") {
  const auto& t = table();
  for (std::uint64_t x : {30ull, 210ull, 1000ull, 4321ull, 10'000ull}) {
    CHECK_THROWS_AS(w1_term_explicit(x, 1, t), InvalidArgument);
    for (int k = 2; k <= 4; ++k) {
      const auto r = moment_report(x, k, t);
      INFO("x=" << x << " k=" << k);
      CHECK(w1_term_explicit(x, k, t, true) == stratum(r.cross_terms_by_w, 1));
      CHECK(w1_term_explicit(x, k, t, false) == stratum(r.kernel_strata, 1));
    }
  }
  const auto r = moment_report(10'000, 2, t);
  CHECK(stratum(r.kernel_strata, 1) == 11'611'288);
  CHECK(stratum(r.cross_terms_by_w, 1) == 4'218'912);
}

TEST_CASE("excess kurtosis and budgets") {
  const auto& t = table();
  CHECK_THROWS_AS(m4_excess(10, 3, t), DomainError);
  CHECK(m4_excess(10'000, 2, t) == doctest::Approx(to_double(fourth_moment_exact_rademacher(10'000, 2, t)) / (2600.0 * 2600.0) - 3.0));
  MomentBudget tight;
  tight.max_set_size = 100;
  CHECK_THROWS_AS(moment_report(10'000, 2, t, tight), ResourceError);
  tight.force = true;
  CHECK_NOTHROW(moment_report(10'000, 2, t, tight));
  CHECK_THROWS_AS(moment_report(2'000'000, 2, t), InvalidArgument);
}

}  // TEST_SUITE
