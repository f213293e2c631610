#include "rmf/sum_plan.hpp"

#include <algorithm>
#include <bit>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

// p^e <= bound without overflow.
bool power_fits(std::uint64_t p, int e, std::uint64_t bound) {
  std::uint64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > bound / p) return false;
    v *= p;
  }
  return true;
}

}  // namespace

PrefixSumPlan::PrefixSumPlan(const FactorTable& table, std::uint64_t x, Selector selector, int k)
    : table_(&table), x_(x), selector_(selector), k_(k) {
  if (x < 1 || x > table.limit()) throw InvalidArgument("plan limit outside factor table");
  if (k < 0) throw InvalidArgument("plan needs k >= 0");
  prime_count_ = table.prime_count(x);

  if (selector == Selector::All) {
    primes_needed_ = prime_count_;
    for (std::uint64_t n = 1; n <= x; ++n) set_size_ += table.squarefree(n) ? 1 : 0;
    return;
  }

  const int first = selector == Selector::Exact ? k : 0;
  for (int j = first; j <= k; ++j) {
    if (j == 0) {
      constant_term_ = true;
      set_size_ += 1;
      continue;
    }
    level_ = j;
    build(x, j, 0);
  }
}

void PrefixSumPlan::build(std::uint64_t bound, int remaining, std::size_t next_index) {
  const auto primes = table_->primes();
  if (remaining == 1) {
    const std::size_t hi = table_->prime_count(bound);
    if (hi <= next_index) return;
    Term term{static_cast<std::uint32_t>(prefix_indices_.size()), static_cast<std::uint32_t>(stack_.size()),
              static_cast<std::uint32_t>(next_index), static_cast<std::uint32_t>(hi)};
    prefix_indices_.insert(prefix_indices_.end(), stack_.begin(), stack_.end());
    terms_.push_back(term);
    set_size_ += hi - next_index;
    primes_needed_ = std::max(primes_needed_, hi);
    return;
  }
  for (std::size_t i = next_index; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    if (!power_fits(p, remaining, bound)) break;
    stack_.push_back(static_cast<std::uint32_t>(i));
    build(bound / p, remaining - 1, i + 1);
    stack_.pop_back();
  }
}

double PrefixSumPlan::evaluate(std::span<const double> eps, Workspace& ws) const {
  if (eps.size() < primes_needed_) throw InvalidArgument("plan evaluation: too few epsilon values");

  if (selector_ == Selector::All) {
    auto& f = ws.dense;
    f.assign(x_ + 1, 0.0);
    f[1] = 1.0;
    const auto primes = table_->primes();
    for (std::size_t i = 0; i < prime_count_; ++i) f[primes[i]] = eps[i];
    CompensatedSum s;
    s.add(1.0);
    for (std::uint64_t n = 2; n <= x_; ++n) {
      const std::uint64_t p = table_->spf_unchecked(n);
      if (p != n) {
        const std::uint64_t m = n / p;
        f[n] = table_->spf_unchecked(m) == p ? 0.0 : f[p] * f[m];
      }
      if (f[n] != 0.0) s.add(f[n]);
    }
    return s.value();
  }

  auto& c = ws.prefix;
  c.resize(primes_needed_ + 1);
  c[0] = 0.0;
  for (std::size_t i = 0; i < primes_needed_; ++i) c[i + 1] = c[i] + eps[i];

  CompensatedSum s;
  if (constant_term_) s.add(1.0);
  for (const auto& term : terms_) {
    double coef = 1.0;
    for (std::uint32_t j = 0; j < term.prefix_len; ++j) coef *= eps[prefix_indices_[term.prefix_offset + j]];
    if (coef != 0.0) s.add(coef * (c[term.hi] - c[term.lo]));
  }
  return s.value();
}

std::int64_t PrefixSumPlan::evaluate_signs(std::span<const std::uint64_t> words, Workspace& ws) const {
  if (selector_ == Selector::All) throw InvalidArgument("packed signs need the exact or at-most selector");
  if (words.size() < sign_words_needed()) throw InvalidArgument("plan evaluation: too few sign words");
  auto& plus = ws.plus_before;
  plus.resize(words.size() + 1);
  plus[0] = 0;
  for (std::size_t w = 0; w < words.size(); ++w) plus[w + 1] = plus[w] + std::popcount(words[w]);
  // C[i] = sum of the first i signs = 2 #plus - i.
  auto prefix = [&](std::uint32_t i) -> std::int64_t {
    const std::uint64_t below = (i & 63) ? words[i >> 6] & ((std::uint64_t{1} << (i & 63)) - 1) : 0;
    return 2 * (plus[i >> 6] + std::popcount(below)) - static_cast<std::int64_t>(i);
  };
  std::int64_t total = constant_term_ ? 1 : 0;
  for (const auto& term : terms_) {
    std::uint64_t negatives = 0;
    for (std::uint32_t j = 0; j < term.prefix_len; ++j) {
      const std::uint32_t i = prefix_indices_[term.prefix_offset + j];
      negatives += ~(words[i >> 6] >> (i & 63)) & 1;
    }
    const std::int64_t range = prefix(term.hi) - prefix(term.lo);
    total += (negatives & 1) ? -range : range;
  }
  return total;
}

void PrefixSumPlan::increments(std::span<const double> eps, Workspace& ws, std::span<double> out) const {
  if (selector_ != Selector::Exact || k_ < 1) {
    throw InvalidArgument("martingale increments need the exact selector with k >= 1");
  }
  if (out.size() < prime_count_) throw InvalidArgument("increment buffer too small");
  if (eps.size() < primes_needed_) throw InvalidArgument("plan evaluation: too few epsilon values");
  auto& d = ws.coefficient;
  d.assign(prime_count_ + 1, 0.0);
  for (const auto& term : terms_) {
    double coef = 1.0;
    for (std::uint32_t j = 0; j < term.prefix_len; ++j) coef *= eps[prefix_indices_[term.prefix_offset + j]];
    d[term.lo] += coef;
    d[term.hi] -= coef;
  }
  double running = 0.0;
  for (std::size_t i = 0; i < prime_count_; ++i) {
    running += d[i];
    out[i] = i < primes_needed_ ? eps[i] * running : 0.0;
  }
}

}  // namespace rmf
