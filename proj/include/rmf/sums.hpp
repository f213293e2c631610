#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmf/assignment.hpp"
#include "rmf/sieve.hpp"

namespace rmf {

enum class Selector {
  Exact,   ///< omega(n) == k
  AtMost,  ///< omega(n) <= k
  All,     ///< every n <= x
};

std::string to_string(Selector s);
Selector parse_selector(const std::string& s);

/// Which restricted sum of f(n) over n <= x to form.
struct SumSpec {
  std::uint64_t x = 0;
  Selector selector = Selector::Exact;
  int k = 1;
  std::optional<std::uint64_t> largest_prime;  ///< restrict to P(n) == p

  /// Membership of a squarefree-support integer n in the summation set.
  bool contains(std::uint64_t n, const FactorTable& t) const;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// f(n) = prod_{p | n} eps_p for squarefree n, else 0.
double evaluate_f(std::uint64_t n, const EpsilonAssignment& a, const FactorTable& t);

/// f(0..x) in one multiplicative pass (entry 0 is unused and set to 0).
std::vector<double> f_values(std::uint64_t x, const EpsilonAssignment& a, const FactorTable& t);

/// Exact finite sum over the selected set, ascending n, compensated.
double sum_M(const SumSpec& spec, const EpsilonAssignment& a, const FactorTable& t);

struct Increment {
  std::uint64_t prime = 0;
  double value = 0.0;
};

/// M_p^(k)(x) for every prime p <= x, ascending p. Each increment sums its
/// n ascending with compensation.
std::vector<Increment> martingale_increments(std::uint64_t x, int k, const EpsilonAssignment& a,
                                             const FactorTable& t);

/// Ascending-p compensated sum of increments.
double sum_increments(std::span<const Increment> increments);

/// Regression property of the exchangeable pair (M, N) obtained by
/// resampling eps at one uniformly chosen prime I <= x.
struct ExchangeablePairCheck {
  double m = 0.0;                ///< M^(k)(x)
  std::size_t prime_count = 0;   ///< pi(x)
  double closed_form = 0.0;      ///< (1 - k/pi(x)) M
  double direct_average = 0.0;   ///< average over I of E(N | eps), eps'_I -> mean 0
  double difference = 0.0;       ///< closed_form - direct_average
};

ExchangeablePairCheck exchangeable_pair(std::uint64_t x, int k, const EpsilonAssignment& a,
                                        const FactorTable& t);

}  // namespace rmf
