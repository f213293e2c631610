#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmf/sieve.hpp"
#include "rmf/sums.hpp"

namespace rmf {

/// Assignment-independent compilation of M^(k)(x) or M^(<=k)(x) for repeated
/// evaluation in Monte Carlo loops.
///
/// Every n with j distinct primes p_1 < ... < p_j is grouped by its prefix
/// p_1 ... p_{j-1}; the admissible last primes form a contiguous range of
/// prime indices, so one prefix contributes
///   eps(p_1) ... eps(p_{j-1}) * (C[hi] - C[lo]),
/// with C the prefix sums of eps over primes. Cost per evaluation is
/// O(pi(x / 2^{k-1}) + #prefixes) instead of O(#S_{k,x}).
///
/// Selector::All has no such structure and is evaluated by a dense
/// multiplicative pass over n <= x.
class PrefixSumPlan {
 public:
  PrefixSumPlan(const FactorTable& table, std::uint64_t x, Selector selector, int k);

  std::uint64_t x() const noexcept { return x_; }
  Selector selector() const noexcept { return selector_; }
  int k() const noexcept { return k_; }

  /// Number of leading primes whose epsilon values are read.
  std::size_t primes_needed() const noexcept { return primes_needed_; }
  /// Size of the summation set, i.e. E M^2 for any admissible model.
  std::uint64_t set_size() const noexcept { return set_size_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  /// Scratch buffers reused across evaluations (one per worker).
  struct Workspace {
    std::vector<double> prefix;
    std::vector<double> coefficient;
    std::vector<double> dense;
    std::vector<std::int64_t> plus_before;  ///< +1 signs among the first 64w primes
  };

  /// M for the given epsilons (eps[i] belongs to the i-th prime).
  double evaluate(std::span<const double> eps, Workspace& ws) const;

  /// Number of 64-bit sign words evaluate_signs reads.
  std::size_t sign_words_needed() const noexcept { return (primes_needed_ + 63) / 64; }

  /// M for Rademacher signs packed as by fill_rademacher_words; exact
  /// integer arithmetic (exact and at-most selectors only).
  std::int64_t evaluate_signs(std::span<const std::uint64_t> words, Workspace& ws) const;

  /// Martingale increments M_p for the first pi(x) primes (exact selector,
  /// k >= 1 only). out.size() must be >= pi(x).
  void increments(std::span<const double> eps, Workspace& ws, std::span<double> out) const;

  std::size_t prime_count() const noexcept { return prime_count_; }

 private:
  struct Term {
    std::uint32_t prefix_offset;
    std::uint32_t prefix_len;
    std::uint32_t lo;
    std::uint32_t hi;
  };

  void build(std::uint64_t bound, int remaining, std::size_t next_index);

  const FactorTable* table_;
  std::uint64_t x_;
  Selector selector_;
  int k_;
  int level_ = 0;
  std::size_t prime_count_ = 0;
  std::size_t primes_needed_ = 0;
  std::uint64_t set_size_ = 0;
  bool constant_term_ = false;
  std::vector<Term> terms_;
  std::vector<std::uint32_t> prefix_indices_;
  std::vector<std::uint32_t> stack_;
};

}  // namespace rmf
