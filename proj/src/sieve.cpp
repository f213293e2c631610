#include "rmf/sieve.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

constexpr std::array<char, 4> kMagic = {'R', 'M', 'F', '1'};
constexpr std::uint32_t kCacheVersion = 1;

// Below this limit a filtered scan is cheaper than inclusion-exclusion.
constexpr std::uint64_t kScanThreshold = std::uint64_t{1} << 18;
constexpr std::size_t kMaxInclusionExclusionPrimes = 16;

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw InvalidArgument("table cache truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void check_budget(std::uint64_t limit, std::uint64_t max_bytes) {
  auto need = FactorTable::required_bytes(limit);
  if (need > max_bytes) {
    throw ResourceError("factor table up to " + std::to_string(limit) + " needs " +
                            std::to_string(need) + " bytes (budget " + std::to_string(max_bytes) +
                            ")",
                        need);
  }
}

}  // namespace

std::uint64_t FactorTable::required_bytes(std::uint64_t limit) {
  // spf + lpf (u32), omega + big omega (u8), primes (~ limit / ln limit u32).
  const std::uint64_t cells = limit + 1;
  const std::uint64_t prime_bound = limit < 100 ? 25 : static_cast<std::uint64_t>(1.26 * limit / std::log(limit)) + 1;
  return cells * (4 + 4 + 1 + 1) + prime_bound * 4;
}

FactorTable FactorTable::build(std::uint64_t limit, std::uint64_t max_bytes) {
  if (limit < 2) throw InvalidArgument("factor table limit must be >= 2, got " + std::to_string(limit));
  if (limit > kMaxLimit) throw InvalidArgument("factor table limit exceeds 32-bit storage");
  check_budget(limit, max_bytes);

  FactorTable t;
  t.limit_ = limit;
  t.spf_.assign(limit + 1, 0);
  t.spf_[1] = 1;
  // Linear sieve: every composite is crossed off exactly once, by its smallest prime.
  for (std::uint64_t n = 2; n <= limit; ++n) {
    if (t.spf_[n] == 0) {
      t.spf_[n] = static_cast<std::uint32_t>(n);
      t.primes_.push_back(static_cast<std::uint32_t>(n));
    }
    const std::uint32_t sn = t.spf_[n];
    for (std::uint32_t p : t.primes_) {
      if (p > sn) break;
      const std::uint64_t m = n * p;
      if (m > limit) break;
      t.spf_[m] = p;
    }
  }
  t.derive();
  return t;
}

FactorTable FactorTable::from_smallest_prime_factors(std::vector<std::uint32_t> spf,
                                                     std::uint64_t max_bytes) {
  if (spf.size() < 3) throw InvalidArgument("smallest-prime-factor array too short");
  const std::uint64_t limit = spf.size() - 1;
  check_budget(limit, max_bytes);
  if (spf[1] != 1) throw InvalidArgument("smallest-prime-factor array: spf[1] must be 1");
  FactorTable t;
  t.limit_ = limit;
  t.spf_ = std::move(spf);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = t.spf_[n];
    if (p < 2 || p > n || n % p != 0 || (p != n && t.spf_[p] != p) ||
        (p != n && t.spf_[n / p] < p)) {
      throw InvalidArgument("smallest-prime-factor array inconsistent at n=" + std::to_string(n));
    }
    if (p == n) t.primes_.push_back(p);
  }
  t.derive();
  return t;
}

void FactorTable::derive() {
  const std::uint64_t limit = limit_;
  lpf_.assign(limit + 1, 0);
  omega_.assign(limit + 1, 0);
  big_omega_.assign(limit + 1, 0);
  lpf_[1] = 1;
  for (std::uint64_t n = 2; n <= limit; ++n) {
    const std::uint32_t p = spf_[n];
    const std::uint64_t m = n / p;
    big_omega_[n] = static_cast<std::uint8_t>(big_omega_[m] + 1);
    omega_[n] = static_cast<std::uint8_t>(omega_[m] + (spf_[m] == p ? 0 : 1));
    lpf_[n] = m == 1 ? p : lpf_[m];
  }
}

std::size_t FactorTable::checked(std::uint64_t n) const {
  if (n < 1 || n > limit_) {
    throw InvalidArgument("n=" + std::to_string(n) + " outside factor table [1, " +
                          std::to_string(limit_) + "]");
  }
  return static_cast<std::size_t>(n);
}

std::size_t FactorTable::prime_count(std::uint64_t y) const {
  if (y > limit_) throw InvalidArgument("pi(y) requested beyond table limit: y=" + std::to_string(y));
  return static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), y) - primes_.begin());
}

std::size_t FactorTable::prime_index(std::uint64_t p) const {
  auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
  if (it == primes_.end() || *it != p) {
    throw InvalidArgument(std::to_string(p) + " is not a prime <= " + std::to_string(limit_));
  }
  return static_cast<std::size_t>(it - primes_.begin());
}

std::vector<std::pair<std::uint64_t, int>> FactorTable::factorize(std::uint64_t n) const {
  if (n == 0) throw InvalidArgument("cannot factorize 0");
  std::vector<std::pair<std::uint64_t, int>> out;
  auto push = [&out](std::uint64_t p) {
    if (!out.empty() && out.back().first == p) {
      ++out.back().second;
    } else {
      out.emplace_back(p, 1);
    }
  };
  // Values beyond the table are reduced by trial division first.
  for (std::size_t i = 0; n > limit_; ++i) {
    if (i == primes_.size()) {
      throw InvalidArgument("factorize: " + std::to_string(n) + " has a prime factor above table limit");
    }
    const std::uint64_t p = primes_[i];
    if (p * p > n) {
      // n itself is prime and exceeds the table.
      throw InvalidArgument("factorize: " + std::to_string(n) + " has a prime factor above table limit");
    }
    while (n % p == 0) {
      push(p);
      n /= p;
    }
  }
  while (n > 1) {
    const std::uint64_t p = spf_[n];
    push(p);
    n /= p;
  }
  return out;
}

std::vector<std::uint32_t> FactorTable::distinct_primes(std::uint64_t n) const {
  checked(n);
  std::vector<std::uint32_t> out;
  while (n > 1) {
    const std::uint32_t p = spf_[n];
    out.push_back(p);
    do n /= p;
    while (n % p == 0);
  }
  return out;
}

std::uint64_t squarefree_kernel(std::uint64_t n, const FactorTable& table) {
  if (n == 0) throw InvalidArgument("squarefree kernel of 0 is undefined");
  std::uint64_t s = 1;
  for (auto [p, e] : table.factorize(n)) {
    if (e % 2 == 1) s *= p;
  }
  return s;
}

std::uint64_t kernel_of_product(std::uint64_t a, std::uint64_t b, const FactorTable& table) {
  if (a == 0 || b == 0) throw InvalidArgument("squarefree kernel of 0 is undefined");
  auto fa = table.factorize(a);
  auto fb = table.factorize(b);
  std::uint64_t s = 1;
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < fb.size()) {
    std::uint64_t p;
    int e = 0;
    if (j == fb.size() || (i < fa.size() && fa[i].first < fb[j].first)) {
      p = fa[i].first;
      e = fa[i++].second;
    } else if (i == fa.size() || fb[j].first < fa[i].first) {
      p = fb[j].first;
      e = fb[j++].second;
    } else {
      p = fa[i].first;
      e = fa[i++].second + fb[j++].second;
    }
    if (e % 2 == 1) s *= p;
  }
  return s;
}

namespace {

void validate(const CountQuery& q, const FactorTable& t) {
  if (q.x > t.limit()) {
    throw InvalidArgument("query x=" + std::to_string(q.x) + " exceeds table limit " +
                          std::to_string(t.limit()));
  }
  if (q.k < 0) throw InvalidArgument("query k must be >= 0");
  auto check_prime = [&t](std::uint64_t p, const char* what) {
    if (p > t.limit()) {
      throw InvalidArgument(std::string(what) + " prime " + std::to_string(p) +
                            " exceeds table limit " + std::to_string(t.limit()));
    }
    if (!t.is_prime(p)) throw InvalidArgument(std::string(what) + " " + std::to_string(p) + " is not prime");
  };
  if (q.largest.kind != LargestPrimeConstraint::Kind::None) check_prime(q.largest.prime, "largest-prime constraint");
  for (auto p : q.excluded_primes) check_prime(p, "excluded");
}

// Membership ignoring excluded primes.
struct Filter {
  const FactorTable& t;
  const CountQuery& q;

  bool operator()(std::uint64_t n) const {
    const int w = t.omega_unchecked(n);
    switch (q.mode) {
      case CountMode::ExactOmega:
        if (w != q.k) return false;
        break;
      case CountMode::SquarefreeExact:
        if (w != q.k || t.big_omega_unchecked(n) != w) return false;
        break;
      case CountMode::SquarefreeAtMost:
        if (w > q.k || t.big_omega_unchecked(n) != w) return false;
        break;
    }
    const std::uint64_t P = t.lpf_unchecked(n);
    using K = LargestPrimeConstraint::Kind;
    switch (q.largest.kind) {
      case K::None: return true;
      case K::Equal: return n > 1 && P == q.largest.prime;
      case K::Below: return P < q.largest.prime;
      case K::AtMost: return P <= q.largest.prime;
      case K::Above: return n > 1 && P > q.largest.prime;
    }
    return false;
  }
};

bool coprime_to(std::uint64_t n, const std::vector<std::uint64_t>& primes) {
  for (auto p : primes) {
    if (n % p == 0) return false;
  }
  return true;
}

// Visit candidates ascending; P(n) = p restricts to multiples of p.
template <typename F>
void for_each_candidate(const CountQuery& q, F&& visit, std::uint64_t step = 1) {
  if (q.largest.kind == LargestPrimeConstraint::Kind::Equal) {
    const std::uint64_t p = q.largest.prime;
    const std::uint64_t stride = std::lcm(p, step);
    for (std::uint64_t n = stride; n <= q.x; n += stride) visit(n);
  } else {
    for (std::uint64_t n = step; n <= q.x; n += step) visit(n);
  }
}

}  // namespace

namespace detail {

std::uint64_t count_by_scan(const CountQuery& query, const FactorTable& table) {
  validate(query, table);
  Filter keep{table, query};
  std::uint64_t c = 0;
  for_each_candidate(query, [&](std::uint64_t n) {
    if (keep(n) && coprime_to(n, query.excluded_primes)) ++c;
  });
  return c;
}

std::uint64_t count_by_inclusion_exclusion(const CountQuery& query, const FactorTable& table) {
  validate(query, table);
  std::vector<std::uint64_t> ps = query.excluded_primes;
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  if (ps.size() > kMaxInclusionExclusionPrimes) {
    throw InvalidArgument("inclusion-exclusion supports at most 16 excluded primes");
  }
  Filter keep{table, query};
  std::int64_t total = 0;
  const std::uint32_t subsets = 1u << ps.size();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    std::uint64_t d = 1;
    bool overflow = false;
    for (std::size_t i = 0; i < ps.size() && !overflow; ++i) {
      if (mask & (1u << i)) {
        d *= ps[i];
        overflow = d > query.x;
      }
    }
    if (overflow) continue;
    std::int64_t c = 0;
    for_each_candidate(query, [&](std::uint64_t n) { c += keep(n) ? 1 : 0; }, d);
    total += (std::popcount(mask) % 2 == 0) ? c : -c;
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace detail

std::uint64_t count(const CountQuery& query, const FactorTable& table) {
  if (!query.excluded_primes.empty() && query.x >= kScanThreshold &&
      query.excluded_primes.size() <= kMaxInclusionExclusionPrimes) {
    return detail::count_by_inclusion_exclusion(query, table);
  }
  return detail::count_by_scan(query, table);
}

std::vector<std::uint64_t> enumerate(const CountQuery& query, const FactorTable& table) {
  validate(query, table);
  Filter keep{table, query};
  std::vector<std::uint64_t> out;
  for_each_candidate(query, [&](std::uint64_t n) {
    if (keep(n) && coprime_to(n, query.excluded_primes)) out.push_back(n);
  });
  return out;
}

std::uint64_t count_squarefree_with_k(std::uint64_t x, int k, const FactorTable& table) {
  CountQuery q;
  q.x = x;
  q.k = k;
  q.mode = CountMode::SquarefreeExact;
  return count(q, table);
}

void save_table(const FactorTable& table, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open table cache for writing: " + path);
    out.write(kMagic.data(), kMagic.size());
    write_le<std::uint32_t>(out, kCacheVersion);
    write_le<std::uint64_t>(out, table.limit());
    auto spf = table.smallest_prime_factors();
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(spf.data()),
                static_cast<std::streamsize>(spf.size() * sizeof(std::uint32_t)));
    } else {
      for (auto v : spf) write_le<std::uint32_t>(out, v);
    }
    if (!out) throw InvalidArgument("failed writing table cache: " + path);
  }
  std::filesystem::rename(tmp, path);
}

FactorTable load_table(const std::string& path, std::uint64_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open table cache: " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidArgument("not a table cache (bad magic): " + path);
  if (read_le<std::uint32_t>(in) != kCacheVersion) throw InvalidArgument("unsupported table cache version");
  const auto limit = read_le<std::uint64_t>(in);
  if (limit < 2 || limit > FactorTable::kMaxLimit) throw InvalidArgument("table cache limit out of range");
  check_budget(limit, max_bytes);
  std::vector<std::uint32_t> spf(limit + 1);
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(spf.data()), static_cast<std::streamsize>(spf.size() * sizeof(std::uint32_t)));
    if (!in) throw InvalidArgument("table cache truncated");
  } else {
    for (auto& v : spf) v = read_le<std::uint32_t>(in);
  }
  return FactorTable::from_smallest_prime_factors(std::move(spf), max_bytes);
}

FactorTable load_or_build(std::uint64_t limit, const std::string& cache_path, std::uint64_t max_bytes) {
  if (!cache_path.empty() && std::filesystem::exists(cache_path)) {
    try {
      auto t = load_table(cache_path, max_bytes);
      if (t.limit() == limit) return t;
    } catch (const InvalidArgument&) {
      // Unusable cache: rebuild below.
    }
  }
  auto t = FactorTable::build(limit, max_bytes);
  if (!cache_path.empty()) {
    try {
      save_table(t, cache_path);
    } catch (const std::exception&) {
      // The cache is an optimisation only.
    }
  }
  return t;
}

}  // namespace rmf
