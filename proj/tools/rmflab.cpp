// rmflab: command-line front end for the random multiplicative function lab.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rmf/assignment.hpp"
#include "rmf/clt.hpp"
#include "rmf/conditional.hpp"
#include "rmf/errors.hpp"
#include "rmf/moments.hpp"
#include "rmf/nt_estimates.hpp"
#include "rmf/report.hpp"
#include "rmf/sieve.hpp"
#include "rmf/stats.hpp"

namespace {

using rmf::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitStrict = 2;
constexpr int kExitBudget = 3;

// Published conditional second moments (kbar = 1, all eps = +1), 3 decimals.
const std::map<std::uint64_t, double> kTable1Reference = {
    {2, 1.000}, {3, 1.333}, {5, 1.806}, {7, 2.472}, {11, 3.249},
    {13, 4.310}, {17, 5.603}, {19, 7.305}, {23, 9.378}, {29, 11.778},
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  // shared
  std::string format = "json";
  std::string out;
  std::string table_cache;
  bool strict = false;
  bool timing = false;
  int threads = 1;
  std::uint64_t seed = 1;
  // sum selection
  std::uint64_t x = 0;
  std::optional<int> k;
  std::string k_rule = "fixed";
  std::string selector = "exact";
  std::string model = "rademacher";
  // moments
  std::uint64_t budget = rmf::MomentBudget{}.max_set_size;
  bool force = false;
  bool w1 = false;
  // Monte Carlo
  std::size_t samples = 10'000;
  std::vector<double> truncation{1.0, 2.0, 3.0};
  std::vector<double> thresholds{0.1, 0.25, 0.5};
  std::string raw_csv;
  bool no_exact = false;
  // conditioning
  std::uint64_t q = 2;
  std::string eps_pattern = "all+";
  std::string mode = "finite";
  double kbar = 1.0;
  std::vector<std::uint64_t> q_list{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  bool sensitivity = false;
  // ntcheck
  std::uint64_t g_cutoff = 1'000'000;
  // sieve
  std::string count_mode = "squarefree";
  std::string largest = "none";
  std::vector<std::uint64_t> exclude;
  std::vector<std::uint64_t> classify;
  bool list = false;
};

struct Output {
  Json result;
  Json config;
  std::string csv;
  std::string text;
  std::uint64_t table_limit = 0;
  bool strict_failed = false;
};

// ---------------------------------------------------------------- helpers

int resolve_k(const Options& o) {
  const double llx = o.x >= 3 ? std::log(std::log(static_cast<double>(o.x))) : 0.0;
  if (o.k_rule == "fixed") {
    if (!o.k) throw UsageError("--k is required with --k-rule fixed");
    return *o.k;
  }
  if (o.k) throw UsageError("--k conflicts with --k-rule " + o.k_rule);
  if (o.k_rule == "floor-loglog") return static_cast<int>(std::floor(llx));
  if (o.k_rule.rfind("c-loglog:", 0) == 0) {
    double c = 0.0;
    try {
      c = std::stod(o.k_rule.substr(9));
    } catch (const std::exception&) {
      throw UsageError("--k-rule c-loglog:<c> needs a number, got '" + o.k_rule + "'");
    }
    if (!(c > 0.0)) throw UsageError("--k-rule c-loglog:<c> needs c > 0");
    return static_cast<int>(std::ceil(c * llx));
  }
  throw UsageError("unknown --k-rule '" + o.k_rule + "' (fixed, floor-loglog, c-loglog:<c>)");
}

void require_x(const Options& o, std::uint64_t minimum = 2) {
  if (o.x < minimum) throw UsageError("--x must be >= " + std::to_string(minimum));
}

rmf::FactorTable make_table(const Options& o, std::uint64_t limit) {
  limit = std::max<std::uint64_t>(limit, 2);
  if (!o.table_cache.empty()) return rmf::load_or_build(limit, o.table_cache);
  return rmf::FactorTable::build(limit);
}

Json sum_config(const Options& o, int k) {
  return {{"x", o.x}, {"k", k}, {"k_rule", o.k_rule}, {"selector", o.selector}};
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Leaves of a JSON tree as (dotted.path, value) rows.
void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", rows);
  } else {
    rows.emplace_back(prefix, scalar_text(j));
  }
}

std::string flat_csv(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::string s = "field,value\n";
  for (const auto& [k, v] : rows) s += csv_escape(k) + "," + csv_escape(v) + "\n";
  return s;
}

std::string flat_text(const Json& j) {
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(j, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::string s;
  for (const auto& [k, v] : rows) s += k + std::string(width - k.size() + 2, ' ') + v + "\n";
  return s;
}

// ---------------------------------------------------------------- commands

Output cmd_table1(const Options& o) {
  Output out;
  out.config = {{"q_list", o.q_list}, {"kbar", o.kbar}, {"sensitivity", o.sensitivity}, {"strict", o.strict}};
  const auto rows = rmf::table1(o.q_list, o.kbar, true);
  Json res;
  res["kbar"] = o.kbar;
  res["rows"] = rmf::to_json(rows);
  double worst = 0.0;
  Json cmp = Json::array();
  for (const auto& r : rows) {
    auto it = kTable1Reference.find(r.q);
    if (it == kTable1Reference.end()) continue;
    const double d = r.value - it->second;
    worst = std::max(worst, std::abs(d));
    cmp.push_back({{"q", r.q}, {"reference", it->second}, {"deviation", d}, {"within_0.001", std::abs(d) <= 0.001}});
  }
  res["reference_comparison"] = cmp;
  res["max_abs_deviation"] = worst;
  const bool strict_ok = worst <= 0.001;
  res["strict_pass"] = strict_ok;

  // Gaussian truncation at a = 3 against the tail mass of the q = 29 row.
  const auto g = rmf::gaussian_truncation(3.0);
  Json chain;
  chain["gaussian_a3"] = rmf::to_json(g);
  if (std::find(o.q_list.begin(), o.q_list.end(), 29) != o.q_list.end()) {
    const auto ex = rmf::conditional_excess(29, o.kbar, 9.0);
    chain["excess_over_9_q29"] = {
        {"mean_excess", ex.mean_excess}, {"patterns_above", ex.patterns_above}, {"patterns", ex.patterns}};
    chain["published_lower_bound"] = 2.0 / 1024.0 * (11.777 - 9.0);
    chain["gaussian_below_excess"] = (1.0 - g.value) < ex.mean_excess;
  }
  res["truncation_chain"] = chain;

  if (o.sensitivity) {
    Json sens = Json::array();
    for (double kb : {0.9 * o.kbar, o.kbar, 1.1 * o.kbar}) {
      sens.push_back({{"kbar", kb}, {"rows", rmf::to_json(rmf::table1(o.q_list, kb, false))}});
    }
    res["sensitivity"] = sens;
  }
  out.result = res;

  out.csv = "q,value\n";
  for (const auto& r : rows) out.csv += std::to_string(r.q) + "," + rmf::round_half_even(r.value, 3) + "\n";
  std::ostringstream t;
  t << "q  | E(M~^2 | eps_2 = ... = eps_q = 1)\n";
  t << "---+----------------------------------\n";
  for (const auto& r : rows) {
    std::string q = std::to_string(r.q);
    t << q << std::string(3 - std::min<std::size_t>(q.size(), 2), ' ') << "| " << rmf::round_half_even(r.value, 3)
      << "\n";
  }
  t << "max |deviation| from reference: " << worst << (strict_ok ? " (ok)\n" : " (exceeds 0.001)\n");
  out.text = t.str();
  out.strict_failed = o.strict && !strict_ok;
  return out;
}

Output cmd_moments(const Options& o) {
  require_x(o, 1);
  const int k = resolve_k(o);
  if (o.selector != "exact") throw UsageError("moments supports --selector exact only");
  Output out;
  out.config = sum_config(o, k);
  out.config["budget"] = o.budget;
  out.config["force"] = o.force;
  out.config["w1"] = o.w1;
  auto table = make_table(o, o.x);
  out.table_limit = table.limit();
  rmf::MomentBudget budget;
  budget.max_set_size = o.budget;
  budget.force = o.force;
  const auto rep = rmf::moment_report(o.x, k, table, budget);
  Json res = rmf::to_json(rep);
  try {
    res["params"] = rmf::to_json(rmf::params(o.x, k));
  } catch (const rmf::DomainError&) {
    res["params"] = nullptr;
  }
  if (o.w1) {
    if (k < 2) throw UsageError("--w1 needs k >= 2");
    res["w1_explicit"] = {{"same_largest_prime", rmf::u128_json(rmf::w1_term_explicit(o.x, k, table, true))},
                          {"kernel_stratum", rmf::u128_json(rmf::w1_term_explicit(o.x, k, table, false))}};
  }
  out.result = res;
  out.csv = "w,kernel_stratum,cross_term\n";
  for (std::size_t i = 0; i < rep.kernel_strata.size(); ++i) {
    out.csv += std::to_string(rep.kernel_strata[i].w) + "," + rmf::to_string_u128(rep.kernel_strata[i].value) + "," +
               rmf::to_string_u128(rep.cross_terms_by_w[i].value) + "\n";
  }
  out.text = flat_text(res);
  return out;
}

Output cmd_simulate(const Options& o) {
  require_x(o);
  const int k = resolve_k(o);
  Output out;
  rmf::SimulationConfig c;
  c.x = o.x;
  c.k = k;
  c.selector = rmf::parse_selector(o.selector);
  c.model = rmf::EpsilonModel::parse(o.model);
  c.samples = o.samples;
  c.seed = o.seed;
  c.threads = o.threads;
  c.truncation_levels = o.truncation;
  c.keep_samples = !o.raw_csv.empty();
  out.config = sum_config(o, k);
  out.config["model"] = c.model.spec();
  out.config["samples"] = o.samples;
  out.config["truncation"] = o.truncation;
  auto table = make_table(o, o.x);
  out.table_limit = table.limit();
  const auto rep = rmf::simulate_distribution(table, c);
  if (!o.raw_csv.empty()) {
    std::string s = "index,value\n";
    char buf[64];
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, rep.samples[i]);
      s += buf;
    }
    rmf::write_atomic(o.raw_csv, s);
  }
  out.result = rmf::to_json(rep);
  out.csv = flat_csv(out.result);
  out.text = flat_text(out.result);
  return out;
}

Output cmd_mcleish(const Options& o) {
  require_x(o);
  const int k = resolve_k(o);
  Output out;
  const auto model = rmf::EpsilonModel::parse(o.model);
  out.config = sum_config(o, k);
  out.config["model"] = model.spec();
  out.config["samples"] = o.samples;
  out.config["thresholds"] = o.thresholds;
  out.config["exact"] = !o.no_exact;
  auto table = make_table(o, o.x);
  out.table_limit = table.limit();
  out.result = rmf::to_json(
      rmf::mcleish_quantities(table, o.x, k, model, o.thresholds, o.samples, o.seed, o.threads, !o.no_exact));
  out.csv = flat_csv(out.result);
  out.text = flat_text(out.result);
  return out;
}

Output cmd_split(const Options& o) {
  require_x(o);
  const int k = resolve_k(o);
  Output out;
  out.config = sum_config(o, k);
  out.config["samples_per_group"] = o.samples;
  out.config["exact"] = !o.no_exact;
  auto table = make_table(o, o.x);
  out.table_limit = table.limit();
  out.result = rmf::to_json(rmf::chatterjee_split(table, o.x, rmf::parse_selector(o.selector), k, o.samples, o.seed,
                                                  o.threads, !o.no_exact));
  out.csv = flat_csv(out.result);
  out.text = flat_text(out.result);
  return out;
}

std::vector<double> parse_pattern(const std::string& p, std::size_t n) {
  if (p == "all+") return std::vector<double>(n, 1.0);
  if (p == "all-") return std::vector<double>(n, -1.0);
  if (p.size() != n) {
    throw UsageError("--eps-pattern needs " + std::to_string(n) + " signs (one per prime <= q), got '" + p + "'");
  }
  std::vector<double> v;
  for (char c : p) {
    if (c == '+') {
      v.push_back(1.0);
    } else if (c == '-') {
      v.push_back(-1.0);
    } else {
      throw UsageError("--eps-pattern accepts only '+' and '-'");
    }
  }
  return v;
}

Output cmd_conditional(const Options& o) {
  Output out;
  rmf::ConditionalSpec spec;
  spec.q = o.q;
  spec.epsilon_values = parse_pattern(o.eps_pattern, rmf::primes_up_to(o.q).size());
  out.config = {{"q", o.q}, {"eps_pattern", o.eps_pattern}, {"mode", o.mode}};
  Json res;
  if (o.mode == "asymptotic") {
    spec.kbar = o.kbar;
    out.config["kbar"] = o.kbar;
    res["value"] = rmf::conditional_second_moment_asymptotic(spec);
  } else if (o.mode == "finite") {
    require_x(o);
    const int k = resolve_k(o);
    spec.x = o.x;
    spec.k = k;
    spec.selector = rmf::parse_selector(o.selector);
    out.config.update(sum_config(o, k));
    auto table = make_table(o, o.x);
    out.table_limit = table.limit();
    res["value"] = rmf::conditional_second_moment_finite(spec, table);
    res["conditional_mean"] = rmf::conditional_mean_finite(spec, table);
  } else {
    throw UsageError("--mode must be finite or asymptotic");
  }
  out.result = res;
  out.csv = flat_csv(res);
  out.text = flat_text(res);
  return out;
}

Output cmd_ntcheck(const Options& o) {
  const std::uint64_t x_max = o.x ? o.x : 10'000'000;
  if (x_max < 1000) throw UsageError("ntcheck needs --x >= 1000");
  Output out;
  out.config = {{"x_max", x_max}, {"g_cutoff", o.g_cutoff}, {"strict", o.strict}};
  auto table = make_table(o, std::max(x_max, o.g_cutoff));
  out.table_limit = table.limit();
  const rmf::CalibratedConstants constants;

  Json checks = Json::array();
  bool ok = true;
  auto add = [&](const rmf::BoundCheck& c) {
    ok = ok && c.pass;
    checks.push_back(rmf::to_json(c));
  };
  add(rmf::hardy_ramanujan_check(table, 100, x_max, constants.hardy_ramanujan_B, constants.hardy_ramanujan_A));
  add(rmf::sathe_selberg_check(table, 100, x_max, constants.sathe_selberg_delta));
  for (const auto& c : rmf::chebychev_mertens_check(table, x_max, std::min<std::uint64_t>(10'000, x_max), {1, 2, 4},
                                                    constants)) {
    add(c);
  }
  add(rmf::smooth_count_check(table, x_max, 0.1, constants.smooth_ratio));

  Json res;
  res["bounds"] = checks;

  const auto g1 = rmf::G_function(1.0, table, o.g_cutoff);
  const double zeta_inv = 6.0 / (std::numbers::pi * std::numbers::pi);
  double worst_residual = 0.0;
  double worst_z = 0.0;
  for (int z = 10; z <= 100; ++z) {
    const double d = rmf::G_log_derivative(z, table, o.g_cutoff);
    const double zd = static_cast<double>(z);
    const double scaled = std::abs(d + std::log(zd * std::log(zd)) + rmf::kEulerGamma) * std::log(zd);
    if (scaled > worst_residual) {
      worst_residual = scaled;
      worst_z = zd;
    }
  }
  const bool g_ok = std::abs(g1.value - zeta_inv) <= 1e-6 && worst_residual <= 3.0;
  ok = ok && g_ok;
  res["G"] = {{"G1", rmf::to_json(g1)},
              {"six_over_pi_squared", zeta_inv},
              {"log_derivative_residual_times_log_z_max", worst_residual},
              {"at_z", worst_z},
              {"pass", g_ok}};

  const std::uint64_t xl = std::min<std::uint64_t>(1'000'000, x_max);
  res["local_ratio"] = rmf::to_json(rmf::local_ratio_check(table, xl, 2));
  res["local_scaling"] = rmf::to_json(rmf::local_scaling_check(table, std::min<std::uint64_t>(100'000, x_max / 2), 3, 2.0));
  Json dens = Json::array();
  for (const auto& P : std::vector<std::vector<std::uint64_t>>{{}, {2, 3}}) {
    dens.push_back(rmf::to_json(rmf::excluded_prime_density_check(table, xl, 2, P, o.g_cutoff)));
  }
  res["excluded_prime_density"] = dens;
  res["all_pass"] = ok;
  out.result = res;
  out.strict_failed = o.strict && !ok;
  out.csv = flat_csv(res);
  out.text = flat_text(res);
  return out;
}

rmf::CountMode parse_count_mode(const std::string& s) {
  if (s == "exact-omega") return rmf::CountMode::ExactOmega;
  if (s == "squarefree") return rmf::CountMode::SquarefreeExact;
  if (s == "at-most") return rmf::CountMode::SquarefreeAtMost;
  throw UsageError("--count-mode must be exact-omega, squarefree or at-most");
}

rmf::LargestPrimeConstraint parse_largest(const std::string& s) {
  if (s == "none") return rmf::LargestPrimeConstraint::none();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--largest must be none or eq|lt|le|gt:<prime>");
  const std::string kind = s.substr(0, colon);
  std::uint64_t p = 0;
  try {
    p = std::stoull(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--largest needs a number after ':'");
  }
  if (kind == "eq") return rmf::LargestPrimeConstraint::equal(p);
  if (kind == "lt") return rmf::LargestPrimeConstraint::below(p);
  if (kind == "le") return rmf::LargestPrimeConstraint::at_most(p);
  if (kind == "gt") return rmf::LargestPrimeConstraint::above(p);
  throw UsageError("--largest kind must be eq, lt, le or gt");
}

Output cmd_sieve(const Options& o) {
  require_x(o, 2);
  Output out;
  const int k = o.k.value_or(1);
  rmf::CountQuery q;
  q.x = o.x;
  q.k = k;
  q.mode = parse_count_mode(o.count_mode);
  q.largest = parse_largest(o.largest);
  q.excluded_primes = o.exclude;
  out.config = {{"x", o.x}, {"k", k}, {"count_mode", o.count_mode}, {"largest", o.largest}, {"exclude", o.exclude}};
  std::uint64_t limit = o.x;
  for (auto n : o.classify) limit = std::max(limit, n);
  auto table = make_table(o, limit);
  out.table_limit = table.limit();
  Json res;
  res["count"] = rmf::count(q, table);
  res["prime_count"] = table.prime_count(o.x);
  if (o.list) res["members"] = rmf::enumerate(q, table);
  Json cls = Json::array();
  for (auto n : o.classify) {
    if (n < 1) throw UsageError("--classify values must be >= 1");
    cls.push_back({{"n", n},
                   {"omega", table.omega(n)},
                   {"big_omega", table.big_omega(n)},
                   {"squarefree", table.squarefree(n)},
                   {"smallest_prime_factor", table.smallest_prime_factor(n)},
                   {"largest_prime_factor", table.largest_prime_factor(n)},
                   {"kernel", rmf::squarefree_kernel(n, table)}});
  }
  if (!o.classify.empty()) res["classify"] = cls;
  out.result = res;
  out.csv = flat_csv(res);
  out.text = flat_text(res);
  return out;
}

// ---------------------------------------------------------------- wiring

void add_sum_options(CLI::App* c, Options& o) {
  c->add_option("--x", o.x, "summation limit x");
  c->add_option("--k", o.k, "number of prime factors k");
  c->add_option("--k-rule", o.k_rule, "fixed | floor-loglog | c-loglog:<c>");
  c->add_option("--selector", o.selector, "exact | at-most | all");
}

void add_mc_options(CLI::App* c, Options& o) {
  c->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  c->add_option("--seed", o.seed, "run seed");
  c->add_option("--model", o.model, "rademacher | gaussian | custom:three-point[:a] | custom:uniform | custom:alternating");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rmflab: exact and Monte Carlo experiments on restricted random multiplicative sums"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t budget_opt = o.budget;
  app.add_option("--format", o.format, "json | csv | table")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("--out", o.out, "write the report to this path (atomically)");
  app.add_option("--table-cache", o.table_cache, "factor table cache file");
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", o.strict, "exit 2 when a pinned check fails");
  app.add_flag("--timing", o.timing, "add wall-clock seconds to the report");
  app.add_option("--budget", budget_opt, "largest #S_{k,x} for exact pair enumeration");
  app.add_flag("--force", o.force, "ignore the pair-enumeration budget");
  app.fallthrough();

  auto* t1 = app.add_subcommand("table1", "asymptotic conditional second moments at kbar");
  t1->add_option("--q-list", o.q_list, "conditioning primes");
  t1->add_option("--kbar", o.kbar, "kbar");
  t1->add_flag("--sensitivity", o.sensitivity, "also evaluate at 0.9 and 1.1 times kbar");

  auto* mo = app.add_subcommand("moments", "exact Rademacher moments and kernel strata");
  add_sum_options(mo, o);
  mo->add_flag("--w1", o.w1, "also evaluate the explicit W = 1 formulas");

  auto* si = app.add_subcommand("simulate", "Monte Carlo distribution of the normalised sum");
  add_sum_options(si, o);
  add_mc_options(si, o);
  si->add_option("--truncation", o.truncation, "levels a for E min{M~^2, a^2}");
  si->add_option("--raw-csv", o.raw_csv, "write every draw to this CSV");

  auto* mc = app.add_subcommand("mcleish", "martingale CLT quantities");
  add_sum_options(mc, o);
  add_mc_options(mc, o);
  mc->add_option("--thresholds", o.thresholds, "Lindeberg thresholds");
  mc->add_flag("--no-exact", o.no_exact, "skip the exact cross-term reference");

  auto* sp = app.add_subcommand("split", "second moments conditioned on eps_2 = +1 and -1");
  add_sum_options(sp, o);
  sp->add_option("--samples", o.samples, "samples per group")->check(CLI::PositiveNumber);
  sp->add_option("--seed", o.seed, "run seed");
  sp->add_flag("--no-exact", o.no_exact, "skip the exact conditional values");

  auto* co = app.add_subcommand("conditional", "conditional second moment given eps_p, p <= q");
  add_sum_options(co, o);
  co->add_option("--q", o.q, "largest conditioning prime");
  co->add_option("--eps-pattern", o.eps_pattern, "all+ | all- | one of +/- per prime <= q");
  co->add_option("--mode", o.mode, "finite | asymptotic");
  co->add_option("--kbar", o.kbar, "kbar (asymptotic mode)");

  auto* nt = app.add_subcommand("ntcheck", "number-theoretic validators");
  nt->add_option("--x", o.x, "scan limit (default 1e7)");
  nt->add_option("--g-cutoff", o.g_cutoff, "Euler product cutoff for G");

  auto* sv = app.add_subcommand("sieve", "counts and classification from the factor table");
  sv->add_option("--x", o.x, "limit");
  sv->add_option("--k", o.k, "k");
  sv->add_option("--count-mode", o.count_mode, "exact-omega | squarefree | at-most");
  sv->add_option("--largest", o.largest, "none | eq:p | lt:p | le:q | gt:r");
  sv->add_option("--exclude", o.exclude, "primes n must be coprime to");
  sv->add_option("--classify", o.classify, "integers to classify");
  sv->add_flag("--list", o.list, "list the members");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  o.budget = budget_opt;

  const auto start = std::chrono::steady_clock::now();
  const std::string command = app.get_subcommands().front()->get_name();
  Output out;
  try {
    if (command == "table1") out = cmd_table1(o);
    else if (command == "moments") out = cmd_moments(o);
    else if (command == "simulate") out = cmd_simulate(o);
    else if (command == "mcleish") out = cmd_mcleish(o);
    else if (command == "split") out = cmd_split(o);
    else if (command == "conditional") out = cmd_conditional(o);
    else if (command == "ntcheck") out = cmd_ntcheck(o);
    else if (command == "sieve") out = cmd_sieve(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rmf::ResourceError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const rmf::ModelInvalid& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "undefined: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  // The thread count never changes results and is left out so reports are
  // byte-identical across it.
  out.config["format"] = o.format;
  Json report = rmf::envelope(command, out.config, out.table_limit, o.seed, out.result);
  if (o.timing) {
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::string text;
  if (o.format == "json") {
    text = report.dump(2) + "\n";
  } else if (o.format == "csv") {
    text = out.csv;
  } else {
    text = out.text;
  }
  try {
    if (o.out.empty()) {
      std::cout << text;
    } else {
      rmf::write_atomic(o.out, text);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return out.strict_failed ? kExitStrict : kExitOk;
}
