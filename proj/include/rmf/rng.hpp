#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rmf {

/// SplitMix64 finaliser: a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Key for an independent stream identified by (seed, stream id, domain tag).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t domain = 0) noexcept {
  return mix64(mix64(seed ^ mix64(domain)) ^ mix64(stream + 0x632BE59BD9B4E019ull));
}

/// Counter-based generator: the i-th output is a pure function of
/// (key, i), so any stream can be regenerated or skipped without state.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t domain = 0) noexcept
      : key_(stream_key(seed, stream, domain)) {}

  /// SplitMix64 output number `counter` of the sequence keyed by key_.
  constexpr std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ + counter * 0x9E3779B97F4A7C15ull);
  }

  constexpr std::uint64_t next() noexcept { return at(counter_++); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller; both outputs of each pair are used.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of the i-th Monte Carlo replicate of a run.
constexpr std::uint64_t replicate_seed(std::uint64_t run_seed, std::uint64_t index) noexcept {
  return stream_key(run_seed, index, 0x5245504C49434154ull);
}

}  // namespace rmf
