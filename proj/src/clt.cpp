#include "rmf/clt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "rmf/assignment.hpp"
#include "rmf/conditional.hpp"
#include "rmf/errors.hpp"
#include "rmf/moments.hpp"
#include "rmf/rng.hpp"
#include "rmf/stats.hpp"
#include "rmf/sum_plan.hpp"

namespace rmf {

namespace {

using Body = std::function<void(std::size_t, int)>;

// Workers pull fixed-size chunks; body(i, worker) must only write slot i.
void run_workers(std::size_t n, int threads, const Body& body) {
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0);
    return;
  }
  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const std::size_t begin = next.fetch_add(kChunk);
          if (begin >= n || failed.load()) return;
          const std::size_t end = std::min(n, begin + kChunk);
          for (std::size_t i = begin; i < end; ++i) body(i, w);
        }
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Sampler {
  const FactorTable& table;
  PrefixSumPlan plan;
  EpsilonModel model;
  bool packed;
  double scale;

  Sampler(const FactorTable& t, std::uint64_t x, Selector selector, int k, const EpsilonModel& m)
      : table(t), plan(t, x, selector, k), model(m) {
    model.validate();
    if (plan.set_size() == 0) {
      throw DomainError("normalisation undefined: empty summation set for x=" + std::to_string(x) +
                        ", k=" + std::to_string(k));
    }
    packed = model.is_rademacher() && selector != Selector::All;
    scale = 1.0 / std::sqrt(static_cast<double>(plan.set_size()));
  }

  struct Scratch {
    PrefixSumPlan::Workspace ws;
    std::vector<std::uint64_t> words;
    std::vector<double> eps;
  };

  // M~ for one replicate; `force_two` overrides eps_2 when nonzero.
  double draw(std::uint64_t seed, Scratch& s, int force_two = 0) const {
    if (packed) {
      s.words.resize(plan.sign_words_needed());
      fill_rademacher_words(seed, s.words);
      if (force_two > 0 && !s.words.empty()) s.words[0] |= 1;
      if (force_two < 0 && !s.words.empty()) s.words[0] &= ~std::uint64_t{1};
      return static_cast<double>(plan.evaluate_signs(s.words, s.ws)) * scale;
    }
    s.eps.resize(plan.primes_needed());
    fill_epsilons(model, seed, table.primes().first(plan.primes_needed()), s.eps);
    if (force_two != 0 && !s.eps.empty()) s.eps[0] = force_two > 0 ? 1.0 : -1.0;
    return plan.evaluate(s.eps, s.ws) * scale;
  }
};

}  // namespace

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  run_workers(n, threads, [&](std::size_t i, int) { body(i); });
}

std::vector<double> draw_normalized(const FactorTable& table, const SimulationConfig& config) {
  if (config.samples == 0) throw InvalidArgument("simulation needs at least one sample");
  const Sampler sampler(table, config.x, config.selector, config.k, config.model);
  const int workers = std::max(1, config.threads);
  std::vector<Sampler::Scratch> scratch(static_cast<std::size_t>(workers));
  std::vector<double> out(config.samples);
  run_workers(config.samples, workers, [&](std::size_t i, int w) {
    out[i] = sampler.draw(replicate_seed(config.seed, i), scratch[static_cast<std::size_t>(w)]);
  });
  return out;
}

DistributionReport simulate_distribution(const FactorTable& table, const SimulationConfig& config) {
  DistributionReport r;
  r.config = config;
  r.set_size = PrefixSumPlan(table, config.x, config.selector, config.k).set_size();
  auto y = draw_normalized(table, config);

  MomentAccumulator first, second, fourth;
  std::vector<MomentAccumulator> trunc(config.truncation_levels.size());
  for (double v : y) {
    first.add(v);
    second.add(v * v);
    fourth.add(v * v * v * v);
    for (std::size_t j = 0; j < trunc.size(); ++j) {
      const double a = config.truncation_levels[j];
      trunc[j].add(std::min(v * v, a * a));
    }
  }
  r.mean = first.mean();
  r.mean_std_error = first.standard_error();
  r.variance = first.sample_variance();
  r.sample_kurtosis = first.kurtosis();
  r.second_moment = second.mean();
  r.second_moment_std_error = second.standard_error();
  r.fourth_moment = fourth.mean();
  r.fourth_moment_std_error = fourth.standard_error();
  r.ks_statistic = ks_statistic(y);
  r.ks_critical_1pct = ks_critical_1pct(y.size());
  for (std::size_t j = 0; j < trunc.size(); ++j) {
    const double a = config.truncation_levels[j];
    r.truncated.push_back({a, trunc[j].mean(), trunc[j].standard_error(), gaussian_truncated_second_moment(a)});
  }
  if (config.keep_samples) r.samples = std::move(y);
  return r;
}

std::vector<TruncatedEstimate> truncated_second_moment_mc(const FactorTable& table, SimulationConfig config,
                                                          const std::vector<double>& levels) {
  for (double a : levels) {
    if (!(a >= 0.0)) throw InvalidArgument("truncation level must be >= 0");
  }
  config.truncation_levels = levels;
  config.keep_samples = false;
  return simulate_distribution(table, config).truncated;
}

McLeishReport mcleish_quantities(const FactorTable& table, std::uint64_t x, int k, const EpsilonModel& model,
                                 const std::vector<double>& thresholds, std::size_t samples, std::uint64_t seed,
                                 int threads, bool with_exact) {
  if (samples == 0) throw InvalidArgument("McLeish estimates need at least one sample");
  model.validate();
  const PrefixSumPlan plan(table, x, Selector::Exact, k);
  if (plan.set_size() == 0) throw DomainError("normalisation undefined: empty summation set");
  McLeishReport r;
  r.x = x;
  r.k = k;
  r.model = model.spec();
  r.samples = samples;
  r.seed = seed;

  // sum_p E M_p^2 = sum_p #S_{p,k,x}, counted independently of the plan.
  std::vector<std::uint64_t> per_prime(table.prime_count(x), 0);
  for (std::uint64_t n = 2; n <= x; ++n) {
    if (table.omega_unchecked(n) == k && table.big_omega_unchecked(n) == k) {
      ++per_prime[table.prime_index(table.lpf_unchecked(n))];
    }
  }
  std::uint64_t total = 0;
  for (auto c : per_prime) total += c;
  r.normalized_variance_sum = static_cast<double>(total) / static_cast<double>(plan.set_size());

  const std::size_t nq = thresholds.size();
  const std::size_t width = nq + 2;  // thresholds..., cross, fourth
  std::vector<double> values(samples * width);
  const double inv = 1.0 / static_cast<double>(plan.set_size());
  const int workers = std::max(1, threads);
  struct Scratch {
    PrefixSumPlan::Workspace ws;
    std::vector<double> eps, inc;
  };
  std::vector<Scratch> scratch(static_cast<std::size_t>(workers));
  const auto primes = table.primes().first(plan.prime_count());
  run_workers(samples, workers, [&](std::size_t i, int w) {
    auto& s = scratch[static_cast<std::size_t>(w)];
    s.eps.resize(plan.prime_count());
    s.inc.resize(plan.prime_count());
    fill_epsilons(model, replicate_seed(seed, i), primes, s.eps);
    plan.increments(s.eps, s.ws, s.inc);
    double* row = values.data() + i * width;
    std::fill(row, row + width, 0.0);
    double s2 = 0.0, s4 = 0.0;
    for (double m : s.inc) {
      const double x2 = m * m * inv;
      s2 += x2;
      s4 += x2 * x2;
      for (std::size_t j = 0; j < nq; ++j) {
        if (x2 > thresholds[j] * thresholds[j]) row[j] += x2;
      }
    }
    row[nq] = s2 * s2 - s4;
    row[nq + 1] = s4;
  });

  std::vector<MomentAccumulator> acc(width);
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < width; ++j) acc[j].add(values[i * width + j]);
  }
  for (std::size_t j = 0; j < nq; ++j) r.lindeberg.push_back({thresholds[j], acc[j].mean(), acc[j].standard_error()});
  r.cross_term_estimate = acc[nq].mean();
  r.cross_term_std_error = acc[nq].standard_error();
  r.fourth_sum_estimate = acc[nq + 1].mean();
  r.fourth_sum_std_error = acc[nq + 1].standard_error();

  if (with_exact && model.is_rademacher()) {
    try {
      const auto m = moment_report(x, k, table);
      const double n2 = to_double(static_cast<u128>(m.second_moment) * m.second_moment);
      r.cross_term_exact = to_double(m.cross_terms_total - m.increment_fourth_sum) / n2;
      r.fourth_sum_exact = to_double(m.increment_fourth_sum) / n2;
      r.has_exact = true;
      if (r.cross_term_std_error > 0.0) {
        r.cross_term_z = (r.cross_term_estimate - r.cross_term_exact) / r.cross_term_std_error;
      }
    } catch (const ResourceError&) {
      r.has_exact = false;
    }
  }
  return r;
}

ChatterjeeSplit chatterjee_split(const FactorTable& table, std::uint64_t x, Selector selector, int k,
                                 std::size_t samples_per_group, std::uint64_t seed, int threads, bool with_exact) {
  if (samples_per_group < 2) throw InvalidArgument("variance split needs at least two samples per group");
  if (x < 2) throw InvalidArgument("variance split needs x >= 2");
  const Sampler sampler(table, x, selector, k, EpsilonModel::rademacher());
  ChatterjeeSplit r;
  r.x = x;
  r.selector = selector;
  r.k = k;
  r.samples_per_group = samples_per_group;
  r.seed = seed;

  const int workers = std::max(1, threads);
  std::vector<Sampler::Scratch> scratch(static_cast<std::size_t>(workers));
  std::vector<double> plus(samples_per_group), minus(samples_per_group);
  run_workers(2 * samples_per_group, workers, [&](std::size_t j, int w) {
    const std::size_t i = j / 2;
    auto& s = scratch[static_cast<std::size_t>(w)];
    if (j % 2 == 0) {
      plus[i] = sampler.draw(replicate_seed(seed, j), s, +1);
    } else {
      minus[i] = sampler.draw(replicate_seed(seed, j), s, -1);
    }
  });

  MomentAccumulator p1, p2, m1, m2;
  for (std::size_t i = 0; i < samples_per_group; ++i) {
    p1.add(plus[i]);
    p2.add(plus[i] * plus[i]);
    m1.add(minus[i]);
    m2.add(minus[i] * minus[i]);
  }
  r.plus_second_moment = p2.mean();
  r.plus_std_error = p2.standard_error();
  r.plus_variance = p1.sample_variance();
  r.minus_second_moment = m2.mean();
  r.minus_std_error = m2.standard_error();
  r.minus_variance = m1.sample_variance();
  r.difference = r.plus_second_moment - r.minus_second_moment;
  r.difference_std_error = std::hypot(r.plus_std_error, r.minus_std_error);
  r.z_score = r.difference_std_error > 0.0 ? r.difference / r.difference_std_error : 0.0;

  if (with_exact) {
    ConditionalSpec spec;
    spec.q = 2;
    spec.x = x;
    spec.k = k;
    spec.selector = selector;
    spec.epsilon_values = {1.0};
    r.plus_exact = conditional_second_moment_finite(spec, table);
    spec.epsilon_values = {-1.0};
    r.minus_exact = conditional_second_moment_finite(spec, table);
    r.has_exact = true;
  }
  return r;
}

double ks_self_test(std::size_t trials, std::size_t n, std::uint64_t seed) {
  if (trials == 0 || n == 0) throw InvalidArgument("KS self-test needs trials and samples");
  std::size_t below = 0;
  std::vector<double> draws(n);
  for (std::size_t t = 0; t < trials; ++t) {
    CounterRng rng(seed, t, 0x4B53);
    for (auto& d : draws) d = rng.normal();
    if (ks_statistic(draws) < ks_critical_1pct(n)) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(trials);
}

}  // namespace rmf
