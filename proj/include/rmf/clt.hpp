#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rmf/model.hpp"
#include "rmf/sieve.hpp"
#include "rmf/sums.hpp"

namespace rmf {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed exactly once; callers write results by index so the outcome
/// does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

struct SimulationConfig {
  std::uint64_t x = 0;
  Selector selector = Selector::Exact;
  int k = 1;
  EpsilonModel model = EpsilonModel::rademacher();
  std::size_t samples = 10'000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::vector<double> truncation_levels;  ///< a values for E min{M~^2, a^2}
  bool keep_samples = false;
};

struct TruncatedEstimate {
  double a = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double gaussian = 0.0;  ///< limit value for a standard normal
};

struct DistributionReport {
  SimulationConfig config;
  std::uint64_t set_size = 0;  ///< E M^2
  double mean = 0.0;
  double mean_std_error = 0.0;
  double variance = 0.0;       ///< sample variance of M~
  double second_moment = 0.0;  ///< mean of M~^2
  double second_moment_std_error = 0.0;
  double fourth_moment = 0.0;  ///< mean of M~^4
  double fourth_moment_std_error = 0.0;
  double sample_kurtosis = 0.0;  ///< central fourth moment / variance^2
  double ks_statistic = 0.0;
  double ks_critical_1pct = 0.0;
  std::vector<TruncatedEstimate> truncated;
  std::vector<double> samples;  ///< M~ draws, only with keep_samples
};

/// Draws of M~ = M / sqrt(E M^2); sample i uses replicate_seed(seed, i).
/// Throws DomainError when the summation set is empty.
DistributionReport simulate_distribution(const FactorTable& table, const SimulationConfig& config);

/// Raw draws of M~, in sample order.
std::vector<double> draw_normalized(const FactorTable& table, const SimulationConfig& config);

/// E min{M~^2, a^2} estimates with standard errors and the Gaussian column.
std::vector<TruncatedEstimate> truncated_second_moment_mc(const FactorTable& table, SimulationConfig config,
                                                          const std::vector<double>& levels);

struct LindebergEstimate {
  double threshold = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Martingale CLT quantities for X_p = M_p / sqrt(E M^2).
struct McLeishReport {
  std::uint64_t x = 0;
  int k = 0;
  std::string model;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double normalized_variance_sum = 0.0;  ///< sum_p E X_p^2, exact
  std::vector<LindebergEstimate> lindeberg;  ///< E sum_p X_p^2 1{|X_p| > eps}
  double cross_term_estimate = 0.0;      ///< sum_{p != q} E X_p^2 X_q^2
  double cross_term_std_error = 0.0;
  double fourth_sum_estimate = 0.0;      ///< sum_p E X_p^4
  double fourth_sum_std_error = 0.0;
  bool has_exact = false;                ///< Rademacher and within the exact budget
  double cross_term_exact = 0.0;
  double fourth_sum_exact = 0.0;
  double cross_term_z = 0.0;             ///< (estimate - exact) / std_error
};

McLeishReport mcleish_quantities(const FactorTable& table, std::uint64_t x, int k, const EpsilonModel& model,
                                 const std::vector<double>& thresholds, std::size_t samples,
                                 std::uint64_t seed, int threads = 1, bool with_exact = true);

/// Second moments of M~ conditioned on eps_2 = +1 and eps_2 = -1.
struct ChatterjeeSplit {
  std::uint64_t x = 0;
  Selector selector = Selector::Exact;
  int k = 0;
  std::size_t samples_per_group = 0;
  std::uint64_t seed = 0;
  double plus_second_moment = 0.0;
  double plus_std_error = 0.0;
  double plus_variance = 0.0;
  double minus_second_moment = 0.0;
  double minus_std_error = 0.0;
  double minus_variance = 0.0;
  double difference = 0.0;  ///< plus - minus
  double difference_std_error = 0.0;
  double z_score = 0.0;
  bool has_exact = false;
  double plus_exact = 0.0;
  double minus_exact = 0.0;
};

/// Rademacher only. The +1 group uses replicate seeds 2i, the -1 group 2i+1,
/// with eps_2 overwritten. Exact conditional values are attached when
/// with_exact is set.
ChatterjeeSplit chatterjee_split(const FactorTable& table, std::uint64_t x, Selector selector, int k,
                                 std::size_t samples_per_group, std::uint64_t seed, int threads = 1,
                                 bool with_exact = true);

/// Fraction of `trials` KS statistics of n standard normal draws that fall
/// below 1.63 / sqrt(n).
double ks_self_test(std::size_t trials, std::size_t n, std::uint64_t seed);

}  // namespace rmf
