#include "rmf/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "rmf/errors.hpp"

namespace rmf {

Json u128_json(u128 v) { return to_string_u128(v); }

namespace {

Json strata_json(const std::vector<Stratum>& strata) {
  Json a = Json::array();
  for (const auto& s : strata) a.push_back({{"w", s.w}, {"value", u128_json(s.value)}});
  return a;
}

// NaN and infinities are not JSON numbers.
Json real(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

Json to_json(const MomentReport& r) {
  Json j;
  j["x"] = r.x;
  j["k"] = r.k;
  j["second_moment"] = r.second_moment;
  j["fourth_moment"] = u128_json(r.fourth_moment);
  j["m4_excess"] = real(r.m4_excess);
  j["m1_term"] = u128_json(r.m1_term);
  j["kernel_strata"] = strata_json(r.kernel_strata);
  j["cross_terms_by_w"] = strata_json(r.cross_terms_by_w);
  j["cross_terms_total"] = u128_json(r.cross_terms_total);
  j["increment_fourth_sum"] = u128_json(r.increment_fourth_sum);
  j["odd_kernel_pairs"] = r.odd_kernel_pairs;
  j["pairs_examined"] = r.pairs_examined;
  return j;
}

Json to_json(const std::vector<Table1Row>& rows) {
  Json a = Json::array();
  for (const auto& r : rows) {
    a.push_back({{"q", r.q},
                 {"value", r.value},
                 {"rounded", round_half_even(r.value, 3)},
                 {"max_over_patterns", r.max_over_patterns},
                 {"patterns", r.patterns}});
  }
  return a;
}

Json to_json(const DistributionReport& r) {
  Json j;
  j["x"] = r.config.x;
  j["selector"] = to_string(r.config.selector);
  j["k"] = r.config.k;
  j["model"] = r.config.model.spec();
  j["n_samples"] = r.config.samples;
  j["seed"] = r.config.seed;
  j["set_size"] = r.set_size;
  j["mean"] = real(r.mean);
  j["mean_std_error"] = real(r.mean_std_error);
  j["variance"] = real(r.variance);
  j["second_moment"] = real(r.second_moment);
  j["second_moment_std_error"] = real(r.second_moment_std_error);
  j["fourth_moment"] = real(r.fourth_moment);
  j["fourth_moment_std_error"] = real(r.fourth_moment_std_error);
  j["sample_kurtosis"] = real(r.sample_kurtosis);
  j["ks_statistic"] = real(r.ks_statistic);
  j["ks_critical_1pct"] = real(r.ks_critical_1pct);
  Json t = Json::array();
  for (const auto& e : r.truncated) {
    t.push_back({{"a", e.a}, {"estimate", e.estimate}, {"std_error", e.std_error}, {"gaussian", e.gaussian}});
  }
  j["truncated_second_moments"] = t;
  return j;
}

Json to_json(const McLeishReport& r) {
  Json j;
  j["x"] = r.x;
  j["k"] = r.k;
  j["model"] = r.model;
  j["n_samples"] = r.samples;
  j["seed"] = r.seed;
  j["normalized_variance_sum"] = r.normalized_variance_sum;
  Json l = Json::array();
  for (const auto& e : r.lindeberg) {
    l.push_back({{"eps", e.threshold}, {"estimate", e.estimate}, {"std_error", e.std_error}});
  }
  j["lindeberg"] = l;
  j["cross_term_estimate"] = real(r.cross_term_estimate);
  j["cross_term_std_error"] = real(r.cross_term_std_error);
  j["fourth_sum_estimate"] = real(r.fourth_sum_estimate);
  j["fourth_sum_std_error"] = real(r.fourth_sum_std_error);
  if (r.has_exact) {
    j["cross_term_exact"] = r.cross_term_exact;
    j["fourth_sum_exact"] = r.fourth_sum_exact;
    j["cross_term_z"] = real(r.cross_term_z);
  }
  return j;
}

Json to_json(const ChatterjeeSplit& r) {
  Json j;
  j["x"] = r.x;
  j["selector"] = to_string(r.selector);
  j["k"] = r.k;
  j["samples_per_group"] = r.samples_per_group;
  j["seed"] = r.seed;
  j["plus"] = {{"second_moment", r.plus_second_moment},
               {"std_error", r.plus_std_error},
               {"variance", r.plus_variance}};
  j["minus"] = {{"second_moment", r.minus_second_moment},
                {"std_error", r.minus_std_error},
                {"variance", r.minus_variance}};
  j["difference"] = r.difference;
  j["difference_std_error"] = r.difference_std_error;
  j["z_score"] = real(r.z_score);
  if (r.has_exact) j["exact"] = {{"plus", r.plus_exact}, {"minus", r.minus_exact}};
  return j;
}

Json to_json(const BoundCheck& c) {
  Json j;
  j["name"] = c.name;
  j["direction"] = c.direction;
  j["x_min"] = c.x_min;
  j["x_max"] = c.x_max;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["observed_constant"] = real(c.observed_constant);
  j["configured_constant"] = c.configured_constant;
  j["worst_x"] = c.worst_x;
  j["worst_k"] = c.worst_k;
  j["points"] = c.points;
  j["pass"] = c.pass;
  for (const auto& [k, v] : c.extra) j[k] = real(v);
  return j;
}

Json to_json(const LocalRatio& r) {
  return {{"x", r.x},           {"k", r.k},
          {"L", r.L},           {"observed", r.observed},
          {"predicted", r.predicted}, {"relative_deviation", r.relative_deviation}};
}

Json to_json(const ExcludedPrimeDensity& d) {
  return {{"x", d.x},
          {"k", d.k},
          {"excluded", d.excluded},
          {"kbar", d.kbar},
          {"observed", d.observed},
          {"euler_factor", d.euler_factor},
          {"model", d.model},
          {"ratio", d.ratio},
          {"h", 0.0}};
}

Json to_json(const EulerProductValue& g) {
  return {{"value", g.value}, {"half_width", g.half_width}, {"cutoff", g.cutoff}};
}

Json to_json(const GaussianTruncation& g) {
  return {{"a", g.a},
          {"density_term", g.density_term},
          {"tail_term", g.tail_term},
          {"value", g.value},
          {"one_minus_value", 1.0 - g.value}};
}

Json to_json(const AsymptoticParams& p) { return {{"x", p.x}, {"k", p.k}, {"L", p.L}, {"kbar", p.kbar}}; }

Json envelope(const std::string& command, Json config, std::uint64_t table_limit, std::uint64_t seed, Json result) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  j["table_limit"] = table_limit;
  j["seed"] = seed;
  j["result"] = std::move(result);
  return j;
}

void write_atomic(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename report into " + path + ": " + ec.message());
  }
}

std::string round_half_even(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = v * scale;
  const double lower = std::floor(scaled);
  const double frac = scaled - lower;
  double r = 0.0;
  if (std::abs(frac - 0.5) < 1e-9) {
    r = std::fmod(lower, 2.0) == 0.0 ? lower : lower + 1.0;
  } else {
    r = std::round(scaled);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, r / scale);
  return buf;
}

}  // namespace rmf
