#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rmf {

/// Per-integer arithmetic data for 1 <= n <= limit.
///
/// The smallest-prime-factor array is the single source of truth; omega,
/// big-omega and the largest prime factor are derived from it in one linear
/// pass. Conventions for n = 1: omega = big_omega = 0, squarefree, and the
/// largest (and smallest) prime factor is the sentinel 1.
///
/// Immutable after construction and safe for concurrent reads.
class FactorTable {
 public:
  /// Default ceiling on the table's memory footprint.
  static constexpr std::uint64_t kDefaultMaxBytes = std::uint64_t{3} << 30;
  /// Values are stored in 32-bit cells.
  static constexpr std::uint64_t kMaxLimit = 0xFFFFFFFEull;

  /// Sieve up to `limit`. Throws InvalidArgument for limit < 2 and
  /// ResourceError (carrying the byte count) when the table would exceed
  /// `max_bytes`.
  static FactorTable build(std::uint64_t limit, std::uint64_t max_bytes = kDefaultMaxBytes);

  /// Rebuild all derived fields from a smallest-prime-factor array
  /// (spf[0] unused, spf[1] == 1). Validates the array.
  static FactorTable from_smallest_prime_factors(std::vector<std::uint32_t> spf,
                                                 std::uint64_t max_bytes = kDefaultMaxBytes);

  /// Bytes a table of this limit occupies.
  static std::uint64_t required_bytes(std::uint64_t limit);

  std::uint64_t limit() const noexcept { return limit_; }

  std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_[checked(n)]; }
  std::uint32_t largest_prime_factor(std::uint64_t n) const { return lpf_[checked(n)]; }
  int omega(std::uint64_t n) const { return omega_[checked(n)]; }
  int big_omega(std::uint64_t n) const { return big_omega_[checked(n)]; }
  bool squarefree(std::uint64_t n) const {
    auto i = checked(n);
    return omega_[i] == big_omega_[i];
  }
  bool is_prime(std::uint64_t n) const {
    auto i = checked(n);
    return n >= 2 && spf_[i] == n;
  }

  /// Unchecked accessors for hot loops; n must lie in [1, limit].
  int omega_unchecked(std::uint64_t n) const noexcept { return omega_[n]; }
  int big_omega_unchecked(std::uint64_t n) const noexcept { return big_omega_[n]; }
  std::uint32_t lpf_unchecked(std::uint64_t n) const noexcept { return lpf_[n]; }
  std::uint32_t spf_unchecked(std::uint64_t n) const noexcept { return spf_[n]; }

  /// All primes <= limit, ascending.
  std::span<const std::uint32_t> primes() const noexcept { return primes_; }

  /// pi(y) for y <= limit.
  std::size_t prime_count(std::uint64_t y) const;

  /// Position of prime p in primes(). Throws InvalidArgument if p is not a
  /// prime <= limit.
  std::size_t prime_index(std::uint64_t p) const;

  /// Ascending (prime, exponent) pairs. n may exceed limit provided every
  /// prime factor of n is <= limit; otherwise InvalidArgument.
  std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) const;

  /// Distinct prime factors of n <= limit, ascending.
  std::vector<std::uint32_t> distinct_primes(std::uint64_t n) const;

  std::span<const std::uint32_t> smallest_prime_factors() const noexcept { return spf_; }

 private:
  FactorTable() = default;
  void derive();
  std::size_t checked(std::uint64_t n) const;

  std::uint64_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> lpf_;
  std::vector<std::uint8_t> omega_;
  std::vector<std::uint8_t> big_omega_;
  std::vector<std::uint32_t> primes_;
};

/// n divided by its largest square factor. Prime factors of n must be <= the
/// table limit. Throws InvalidArgument for n == 0.
std::uint64_t squarefree_kernel(std::uint64_t n, const FactorTable& table);

/// s(a*b) from the factorisations of a and b separately (both <= limit), so
/// the product is never factored directly. Needs a*b < 2^64.
std::uint64_t kernel_of_product(std::uint64_t a, std::uint64_t b, const FactorTable& table);

enum class CountMode {
  ExactOmega,        ///< omega(n) == k, any n
  SquarefreeExact,   ///< omega(n) == big_omega(n) == k
  SquarefreeAtMost,  ///< squarefree with omega(n) <= k
};

struct LargestPrimeConstraint {
  enum class Kind { None, Equal, Below, AtMost, Above };
  Kind kind = Kind::None;
  std::uint64_t prime = 0;

  static LargestPrimeConstraint none() { return {}; }
  static LargestPrimeConstraint equal(std::uint64_t p) { return {Kind::Equal, p}; }
  static LargestPrimeConstraint below(std::uint64_t p) { return {Kind::Below, p}; }
  static LargestPrimeConstraint at_most(std::uint64_t q) { return {Kind::AtMost, q}; }
  static LargestPrimeConstraint above(std::uint64_t r) { return {Kind::Above, r}; }
};

/// Selects a set of integers 1 <= n <= x. P(1) is taken as 1, so n = 1
/// satisfies Below/AtMost constraints but never Equal/Above.
struct CountQuery {
  std::uint64_t x = 0;
  int k = 0;
  CountMode mode = CountMode::SquarefreeExact;
  LargestPrimeConstraint largest;
  std::vector<std::uint64_t> excluded_primes;  ///< n must be coprime to each
};

/// Exact cardinality of the query set. Small excluded-prime sets above a size
/// threshold are answered by inclusion-exclusion, everything else by a scan.
std::uint64_t count(const CountQuery& query, const FactorTable& table);

/// Ascending members of the query set; size equals count(query).
std::vector<std::uint64_t> enumerate(const CountQuery& query, const FactorTable& table);

namespace detail {
std::uint64_t count_by_scan(const CountQuery& query, const FactorTable& table);
std::uint64_t count_by_inclusion_exclusion(const CountQuery& query, const FactorTable& table);
}  // namespace detail

/// Convenience: #{n <= x : omega(n) == big_omega(n) == k}.
std::uint64_t count_squarefree_with_k(std::uint64_t x, int k, const FactorTable& table);

/// Binary cache: "RMF1", u32 version, u64 limit, then the smallest-prime-factor
/// array as little-endian u32 for n = 0..limit.
void save_table(const FactorTable& table, const std::string& path);
FactorTable load_table(const std::string& path,
                       std::uint64_t max_bytes = FactorTable::kDefaultMaxBytes);

/// Load from `path` if it holds a table with exactly this limit, else build
/// and (best effort) write the cache.
FactorTable load_or_build(std::uint64_t limit, const std::string& cache_path,
                          std::uint64_t max_bytes = FactorTable::kDefaultMaxBytes);

}  // namespace rmf
