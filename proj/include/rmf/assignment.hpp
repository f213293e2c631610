#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmf/model.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

/// One realisation of (epsilon_p) for every prime p <= limit.
///
/// Each epsilon_p is a pure function of (model, seed, p), so extending the
/// limit with the same seed leaves values at smaller primes unchanged.
class EpsilonAssignment {
 public:
  EpsilonAssignment(EpsilonModel model, std::uint64_t limit, std::uint64_t seed,
                    std::vector<double> values)
      : model_(std::move(model)), limit_(limit), seed_(seed), values_(std::move(values)) {}

  const EpsilonModel& model() const noexcept { return model_; }
  std::uint64_t limit() const noexcept { return limit_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Values indexed by position in FactorTable::primes().
  std::span<const double> values() const noexcept { return values_; }
  double at_index(std::size_t i) const { return values_.at(i); }
  double value(std::uint64_t p, const FactorTable& table) const { return at_index(table.prime_index(p)); }

  /// Compact export {"model", "seed", "limit"}; values are regenerated on import.
  std::string to_json() const;
  static EpsilonAssignment from_json(const std::string& text, const FactorTable& table);

 private:
  EpsilonModel model_;
  std::uint64_t limit_;
  std::uint64_t seed_;
  std::vector<double> values_;
};

/// epsilon_p for the prime at position `prime_index` with value p.
double epsilon_value(const EpsilonModel& model, std::uint64_t seed, std::uint64_t p,
                     std::size_t prime_index);

/// Fill out[i] = epsilon for primes[i]; the hot path for Monte Carlo.
void fill_epsilons(const EpsilonModel& model, std::uint64_t seed,
                   std::span<const std::uint32_t> primes, std::span<double> out);

/// Rademacher signs packed by prime index: bit (i mod 64) of word i/64 is set
/// when the i-th prime gets +1. Matches fill_epsilons for the same seed.
void fill_rademacher_words(std::uint64_t seed, std::span<std::uint64_t> out);

/// Validates the model; x must satisfy 2 <= x <= table.limit().
EpsilonAssignment sample_assignment(const EpsilonModel& model, const FactorTable& table,
                                    std::uint64_t x, std::uint64_t seed);

/// Assignment with explicitly chosen values (tests, conditioning patterns).
EpsilonAssignment fixed_assignment(const FactorTable& table, std::uint64_t x,
                                   std::vector<double> values,
                                   EpsilonModel model = EpsilonModel::rademacher());

}  // namespace rmf
