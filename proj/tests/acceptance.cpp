// Acceptance suite: one PASS/FAIL line per criterion at the pinned tolerances.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "oracles.hpp"
#include "rmf/clt.hpp"
#include "rmf/conditional.hpp"
#include "rmf/moments.hpp"
#include "rmf/nt_estimates.hpp"
#include "rmf/report.hpp"
#include "rmf/stats.hpp"
#include "rmf/sums.hpp"

using namespace rmf;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const std::string& id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] %-4s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const FactorTable& table() {
  static const FactorTable t = FactorTable::build(10'000'000);
  return t;
}

void table_reproduction() {
  const std::vector<std::uint64_t> qs = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  const std::array<double, 10> published = {1.000, 1.333, 1.806, 2.472, 3.249, 4.310, 5.603, 7.305, 9.378, 11.778};
  const auto t0 = Clock::now();
  const auto rows = table1(qs, 1.0, true);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) worst = std::max(worst, std::abs(rows[i].value - published[i]));
  report("1", worst <= 0.001 && elapsed < 1.0, "conditional second moments at kbar = 1",
         fmt("max |dev| %.6f (tol 0.001), q = 29 value %.6f, %.3f s (limit 1 s)", worst, rows.back().value, elapsed));
}

void gaussian_chain() {
  const auto g = gaussian_truncation(3.0);
  const double margin = 1.0 - g.value;
  const double threshold = 2.0 / 1024.0 * (11.777 - 9.0);
  const bool ok = std::abs(g.density_term - 0.02660) < 5e-5 && std::abs(g.tail_term - 0.02159) < 5e-5 &&
                  std::abs(margin - 0.00501) < 5e-5 && margin < 0.0054 && threshold >= 0.0054;
  report("2", ok, "truncated Gaussian inequality at a = 3",
         fmt("density %.6f (0.02660), tail %.6f (0.02159), 1 - value %.6f < 0.0054 <= %.6f", g.density_term,
             g.tail_term, margin, threshold));
}

void exhaustive_oracle() {
  const auto& t = table();
  const auto t0 = Clock::now();
  bool ok = true;
  int cases = 0;
  for (std::uint64_t x = 2; x <= 30; ++x) {
    const auto primes = oracle::primes_to(x);
    const std::uint64_t patterns = std::uint64_t{1} << primes.size();
    for (int k = 1; k <= 3; ++k) {
      const auto set = oracle::squarefree_set(x, k);
      if (set.empty()) continue;
      unsigned long long s2 = 0, s4 = 0;
      for (std::uint64_t pat = 0; pat < patterns; ++pat) {
        long long m = 0;
        for (auto n : set) m += oracle::f_signed(n, primes, pat);
        const auto mm = static_cast<unsigned long long>(m * m);
        s2 += mm;
        s4 += mm * mm;
      }
      const auto r = moment_report(x, k, t);
      ok = ok && s2 % patterns == 0 && s4 % patterns == 0 && r.second_moment == s2 / patterns &&
           r.fourth_moment == static_cast<u128>(s4 / patterns) &&
           fourth_moment_exact_rademacher(x, k, t) == r.fourth_moment;
      ++cases;
    }
  }
  const double elapsed = seconds_since(t0);
  report("3", ok && elapsed < 10.0, "second and fourth moments against all sign patterns, x <= 30",
         fmt("%.0f (x, k) cases, %.3f s (limit 10 s)", cases, elapsed));
}

void k1_closed_form() {
  const auto& t = table();
  bool ok = true;
  std::string detail;
  for (std::uint64_t x : {100ull, 10'000ull, 1'000'000ull}) {
    const u128 p = t.prime_count(x);
    const auto r = moment_report(x, 1, t);
    ok = ok && r.fourth_moment == 3 * p * p - 2 * p && r.m4_excess == -2.0 / static_cast<double>(p);
    detail += "x=" + std::to_string(x) + " E M^4=" + to_string_u128(r.fourth_moment) + " ";
  }
  report("4", ok, "k = 1 closed form 3 pi^2 - 2 pi and excess -2/pi", detail + "(exact)");
}

void partition_parity() {
  const auto& t = table();
  bool ok = true;
  int cases = 0;
  for (std::uint64_t x : {10ull, 30ull, 100ull, 300ull, 1000ull, 3000ull, 10'000ull, 30'000ull, 100'000ull}) {
    for (int k = 1; k <= 6; ++k) {
      const auto n = second_moment(x, k, Selector::Exact, t);
      if (n == 0 || n > 10'000) continue;
      const auto r = moment_report(x, k, t);
      u128 kernels = 0, cross = 0;
      for (const auto& s : r.kernel_strata) kernels += s.value;
      for (const auto& s : r.cross_terms_by_w) cross += s.value;
      ok = ok && kernels == r.fourth_moment && cross == r.cross_terms_total && r.odd_kernel_pairs == 0;
      ++cases;
    }
  }
  report("5", ok, "strata sum to the fourth moment and odd kernels are empty",
         fmt("%.0f (x, k) cases with #S <= 1e4", cases));
}

// Running W = 1 totals as x grows: each new n in S_{k,x} pairs with the
// earlier b = n s / r (s < r) sharing all primes but one.
void w1_agreement() {
  const auto& t = table();
  bool ok = true;
  std::uint64_t checks = 0;
  for (int k = 2; k <= 4; ++k) {
    std::unordered_map<std::uint64_t, std::uint64_t> same_p, any;
    u128 cross = 0, kernel = 0;
    for (std::uint64_t x = 2; x <= 10'000; ++x) {
      if (t.squarefree(x) && t.omega(x) == k) {
        const auto ps = t.distinct_primes(x);
        const std::uint64_t P = ps.back();
        for (std::uint64_t r : ps) {
          for (auto s : t.primes()) {
            if (s >= r) break;
            if (x % s == 0) continue;
            const std::uint64_t m = r * s;
            auto& c = any[m];
            kernel += 4 * static_cast<u128>(c) + 4;
            c += 2;
            if (r != P) {
              auto& d = same_p[m];
              cross += 4 * static_cast<u128>(d) + 4;
              d += 2;
            }
          }
        }
      }
      ok = ok && w1_term_explicit(x, k, t, true) == cross && w1_term_explicit(x, k, t, false) == kernel;
      ++checks;
      if (x % 1000 == 0) {
        const auto r = moment_report(x, k, t);
        u128 lib_cross = 0, lib_kernel = 0;
        for (const auto& s : r.cross_terms_by_w)
          if (s.w == 1) lib_cross = s.value;
        for (const auto& s : r.kernel_strata)
          if (s.w == 1) lib_kernel = s.value;
        ok = ok && lib_cross == cross && lib_kernel == kernel;
      }
    }
  }
  report("6", ok, "explicit W = 1 formula against the W = 1 strata",
         fmt("%.0f (x, k) points, every x <= 1e4, k = 2, 3, 4", static_cast<double>(checks)));
}

void tower_law() {
  const auto& t = table();
  double worst = 0.0;
  for (std::uint64_t q : {2ull, 3ull, 5ull}) {
    const std::uint64_t patterns = std::uint64_t{1} << primes_up_to(q).size();
    double avg = 0.0;
    for (std::uint64_t pat = 0; pat < patterns; ++pat) {
      auto s = ConditionalSpec::from_pattern(q, pat);
      s.x = 10'000;
      s.k = 2;
      avg += conditional_second_moment_finite(s, t);
    }
    worst = std::max(worst, std::abs(avg / static_cast<double>(patterns) - 1.0));
  }
  report("7", worst < 1e-10, "pattern average of finite conditional second moments",
         fmt("max |avg - 1| %.3e (tol 1e-10)", worst));
}

void exchangeable() {
  const auto& t = table();
  const std::uint64_t x = 1000;
  const std::size_t np = t.prime_count(x);
  double worst = 0.0;
  bool ok = true;
  SumSpec spec;
  spec.x = x;
  for (int k = 1; k <= 3; ++k) {
    spec.k = k;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto a = sample_assignment(EpsilonModel::rademacher(), t, x, 1000 + seed);
      const auto r = exchangeable_pair(x, k, a, t);
      // Averaging the fresh eps_I out sets it to its mean, zero.
      double total = 0.0;
      for (std::size_t i = 0; i < np; ++i) {
        std::vector<double> v(a.values().begin(), a.values().end());
        v[i] = 0.0;
        total += sum_M(spec, fixed_assignment(t, x, v, EpsilonModel::gaussian()), t);
      }
      const double direct = total / static_cast<double>(np);
      const double scale = 1.0 + std::abs(r.m);
      const double dev = std::max(std::abs(r.closed_form - direct), std::abs(r.closed_form - r.direct_average)) / scale;
      worst = std::max(worst, dev);
      ok = ok && dev <= 1e-10;
    }
  }
  report("8", ok, "exchangeable pair regression E(N | M) = (1 - k/pi(x)) M",
         fmt("300 assignments at x = 1e3, max scaled deviation %.3e (tol 1e-10)", worst));
}

void g_function() {
  const auto& t = table();
  const auto g = G_function(1.0, t, 1'000'000);
  const double dev = std::abs(g.value - 6.0 / (std::numbers::pi * std::numbers::pi));
  double worst = 0.0;
  bool ok = dev < 1e-6;
  for (int z = 10; z <= 100; ++z) {
    const double d = G_log_derivative(z, t, 1'000'000);
    const double residual = std::abs(d + std::log(z * std::log(static_cast<double>(z))) + kEulerGamma);
    worst = std::max(worst, residual * std::log(static_cast<double>(z)));
    ok = ok && residual <= 3.0 / std::log(static_cast<double>(z));
  }
  report("9", ok, "Euler product G",
         fmt("|G(1) - 6/pi^2| %.2e (tol 1e-6); max residual * log z %.4f on [10, 100] (tol 3)", dev, worst));
}

void distributional_trend() {
  const auto& t = table();
  SimulationConfig c;
  c.selector = Selector::Exact;
  c.k = 2;
  c.samples = 100'000;
  c.seed = 7;
  c.x = 1000;
  const double ks_small = simulate_distribution(t, c).ks_statistic;
  c.x = 1'000'000;
  const double ks_large = simulate_distribution(t, c).ks_statistic;
  report("10a", ks_large < ks_small, "KS distance decreases from x = 1e3 to x = 1e6 (k = 2, N = 1e5)",
         fmt("KS(1e3) %.4f, KS(1e6) %.4f", ks_small, ks_large));
  report("10b", ks_large < 0.02, "KS distance at x = 1e6 below 0.02 (k = 2, N = 1e5)",
         fmt("KS(1e6) %.4f (threshold 0.02)", ks_large));

  const int k = k_for_kbar(10'000'000, 1.0);
  const auto s = chatterjee_split(t, 10'000'000, Selector::AtMost, k, 20'000, 11, 1, true);
  report("10c", s.z_score > 5.0, "second moments split by eps_2 at x = 1e7",
         fmt("at-most selector, k = %.0f, plus %.4f (exact %.4f), ", k, s.plus_second_moment, s.plus_exact) +
             fmt("minus %.4f (exact %.4f), z = %.1f (> 5)", s.minus_second_moment, s.minus_exact, s.z_score));
}

void model_robustness() {
  const auto& t = table();
  struct Case {
    std::uint64_t x;
    int k;
  };
  bool ok = true;
  double worst = 0.0;
  int cases = 0;
  for (auto [x, k] : std::vector<Case>{{30, 1}, {30, 2}, {30, 3}, {1000, 2}, {10'000, 2}, {10'000, 3}, {30'000, 4}}) {
    SimulationConfig c;
    c.x = x;
    c.k = k;
    c.selector = Selector::Exact;
    c.model = EpsilonModel::gaussian();
    c.samples = 100'000;
    c.seed = 13;
    const auto r = simulate_distribution(t, c);
    const auto exact = second_moment(x, k, Selector::Exact, t);
    // E M^2 under the Gaussian model estimated in absolute units.
    const double n = static_cast<double>(r.set_size);
    const double z = std::abs(r.second_moment * n - static_cast<double>(exact)) / (r.second_moment_std_error * n);
    worst = std::max(worst, z);
    ok = ok && r.set_size == exact && z < 4.0;
    ++cases;
  }
  report("11", ok, "Gaussian-model second moments against Rademacher exact values",
         fmt("%.0f (x, k) cases, N = 1e5, max |z| %.2f (tol 4)", cases, worst));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(const char* cli) {
  const auto& t = table();
  SimulationConfig c;
  c.x = 1'000'000;
  c.k = 2;
  c.samples = 5000;
  c.seed = 99;
  c.truncation_levels = {1.0, 2.0, 3.0};
  c.threads = 1;
  const auto one = to_json(simulate_distribution(t, c)).dump();
  c.threads = 4;
  const auto four = to_json(simulate_distribution(t, c)).dump();
  bool ok = one == four;
  std::string detail = "library report 1 vs 4 threads " + std::string(one == four ? "identical" : "differ");

  if (cli) {
    const auto dir = std::filesystem::temp_directory_path() / ("rmf_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    bool same = true;
    for (const std::string args : {"simulate --x 100000 --k 2 --samples 4000 --seed 5 --truncation 1 3",
                                   "mcleish --x 1000 --k 2 --samples 2000 --seed 5",
                                   "split --x 100000 --selector at-most --k 2 --samples 2000 --seed 5"}) {
      std::string first;
      for (int threads : {1, 2, 4}) {
        const auto out = dir / ("r" + std::to_string(threads) + ".json");
        const std::string cmd = std::string(cli) + " --threads " + std::to_string(threads) + " --out " +
                                out.string() + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        const auto text = slurp(out);
        same = same && WIFEXITED(status) && WEXITSTATUS(status) == 0 && !text.empty();
        if (threads == 1) first = text;
        same = same && text == first;
      }
    }
    std::filesystem::remove_all(dir);
    ok = ok && same;
    detail += "; CLI reports for 1, 2, 4 threads " + std::string(same ? "identical" : "differ");
  }
  report("12", ok, "byte-identical JSON across thread counts", detail);
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  const std::vector<std::function<void()>> steps = {
      table_reproduction, gaussian_chain, exhaustive_oracle, k1_closed_form, partition_parity, w1_agreement,
      tower_law,          exchangeable,   g_function,        distributional_trend, model_robustness,
      [cli] { determinism(cli); }};
  for (const auto& step : steps) {
    try {
      step();
    } catch (const std::exception& e) {
      report("?", false, "unexpected exception", e.what());
    }
  }
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
