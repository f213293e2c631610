#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rmf/clt.hpp"
#include "rmf/errors.hpp"
#include "rmf/moments.hpp"
#include "rmf/stats.hpp"

using namespace rmf;

namespace {

const FactorTable& table() {
  static const FactorTable t = FactorTable::build(1'000'000);
  return t;
}

SimulationConfig config(std::uint64_t x, Selector s, int k, std::size_t n, std::uint64_t seed) {
  SimulationConfig c;
  c.x = x;
  c.selector = s;
  c.k = k;
  c.samples = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("clt-harness") {

TEST_CASE("parallel_for visits each index once") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("draws do not depend on the thread count") {
  const auto& t = table();
  auto c = config(100'000, Selector::Exact, 2, 2000, 5);
  auto a = draw_normalized(t, c);
  c.threads = 3;
  auto b = draw_normalized(t, c);
  CHECK(a == b);
  c.model = EpsilonModel::gaussian();
  c.threads = 1;
  auto g1 = draw_normalized(t, c);
  c.threads = 4;
  CHECK(g1 == draw_normalized(t, c));
}

TEST_CASE("k = 1 kurtosis matches the exact fourth moment") {
  const auto& t = table();
  auto c = config(10'000, Selector::Exact, 1, 100'000, 21);
  const auto r = simulate_distribution(t, c);
  const double exact = 3.0 - 2.0 / 1229.0;
  CHECK(std::abs(r.fourth_moment - exact) < 5.0 * r.fourth_moment_std_error);
  CHECK(std::abs(r.second_moment - 1.0) < 5.0 * r.second_moment_std_error);
  CHECK(std::abs(r.mean) < 5.0 * r.mean_std_error);
}

TEST_CASE("fourth moment estimate agrees with exact counting at k = 2") {
  const auto& t = table();
  auto c = config(10'000, Selector::Exact, 2, 100'000, 22);
  const auto r = simulate_distribution(t, c);
  const double exact = m4_excess(10'000, 2, t) + 3.0;
  CHECK(std::abs(r.fourth_moment - exact) < 5.0 * r.fourth_moment_std_error);
}

TEST_CASE("second moments agree across admissible models") {
  const auto& t = table();
  for (auto model : {EpsilonModel::gaussian(), EpsilonModel::uniform(), EpsilonModel::three_point(2.0),
                     EpsilonModel::alternating()}) {
    auto c = config(30'000, Selector::AtMost, 2, 50'000, 31);
    c.model = model;
    const auto r = simulate_distribution(t, c);
    INFO(model.spec());
    CHECK(r.set_size == second_moment(30'000, 2, Selector::AtMost, t));
    CHECK(std::abs(r.second_moment - 1.0) < 4.0 * r.second_moment_std_error);
  }
}

TEST_CASE("empty sets and invalid requests") {
  const auto& t = table();
  CHECK_THROWS_AS(simulate_distribution(t, config(10, Selector::Exact, 3, 10, 1)), DomainError);
  CHECK_THROWS_AS(simulate_distribution(t, config(2'000'000, Selector::Exact, 2, 10, 1)), InvalidArgument);
}

TEST_CASE("truncated second moments") {
  const auto& t = table();
  auto c = config(1'000'000, Selector::Exact, 1, 20'000, 41);
  const auto est = truncated_second_moment_mc(t, c, {0.0, 1.0, 3.0});
  REQUIRE(est.size() == 3);
  CHECK(est[0].estimate == 0.0);
  CHECK(est[0].gaussian == 0.0);
  // k = 1 is a sum of independent signs: the Gaussian column applies.
  for (std::size_t i = 1; i < est.size(); ++i) {
    CHECK(est[i].gaussian == gaussian_truncated_second_moment(est[i].a));
    CHECK(std::abs(est[i].estimate - est[i].gaussian) < 5.0 * est[i].std_error + 1e-3);
  }
}

TEST_CASE("McLeish quantities") {
  const auto& t = table();
  const auto r = mcleish_quantities(t, 1000, 2, EpsilonModel::rademacher(), {0.05, 0.1, 0.5, 100.0}, 20'000, 51);
  CHECK(r.normalized_variance_sum == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(r.has_exact);
  CHECK(std::abs(r.cross_term_estimate - r.cross_term_exact) < 4.0 * r.cross_term_std_error);
  CHECK(std::abs(r.fourth_sum_estimate - r.fourth_sum_exact) < 4.0 * r.fourth_sum_std_error);
  REQUIRE(r.lindeberg.size() == 4);
  for (std::size_t i = 1; i < r.lindeberg.size(); ++i) CHECK(r.lindeberg[i].estimate <= r.lindeberg[i - 1].estimate);
  CHECK(r.lindeberg.back().estimate == 0.0);
  // Cross plus diagonal equals E(sum X_p^2)^2, exactly.
  const auto m = moment_report(1000, 2, t);
  const double n = static_cast<double>(m.second_moment);
  CHECK(r.cross_term_exact + r.fourth_sum_exact == doctest::Approx(to_double(m.cross_terms_total) / (n * n)).epsilon(1e-12));
}

TEST_CASE("conditioning on eps_2") {
  const auto& t = table();
  // k = 1: eps_2 enters M only linearly, both groups have second moment 1.
  const auto one = chatterjee_split(t, 100'000, Selector::Exact, 1, 20'000, 61);
  REQUIRE(one.has_exact);
  CHECK(one.plus_exact == doctest::Approx(1.0));
  CHECK(one.minus_exact == doctest::Approx(1.0));
  CHECK(std::abs(one.z_score) < 5.0);
  // At-most selector at k = 2: the groups separate.
  const auto two = chatterjee_split(t, 1'000'000, Selector::AtMost, 2, 20'000, 62);
  CHECK((two.plus_exact + two.minus_exact) / 2.0 == doctest::Approx(1.0));
  CHECK(std::abs(two.plus_second_moment - two.plus_exact) < 5.0 * two.plus_std_error);
  CHECK(std::abs(two.minus_second_moment - two.minus_exact) < 5.0 * two.minus_std_error);
  CHECK(two.z_score > 5.0);
}

TEST_CASE("KS self-test of the normal generator") {
  CHECK(ks_self_test(100, 1000, 71) >= 0.98);
}

}  // TEST_SUITE
