#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmf/sieve.hpp"

namespace rmf {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// L = log log x - log k - log log(k+1) and kbar = k / L.
struct AsymptoticParams {
  std::uint64_t x = 0;
  int k = 0;
  double L = 0.0;
  double kbar = 0.0;
};

/// Throws DomainError when L <= 0 (or k < 1, x < 3).
AsymptoticParams params(std::uint64_t x, int k);

/// The k >= 1 with L(k,x) > 0 whose kbar is closest to `target`.
int k_for_kbar(std::uint64_t x, double target = 1.0);

/// Outcome of scanning a bound with an unspecified constant.
///
/// observed_constant is the extreme constant the scan forces (largest for
/// upper bounds, smallest for lower bounds); pass compares it with the
/// configured value.
struct BoundCheck {
  std::string name;
  std::string direction;  ///< "upper" or "lower"
  std::uint64_t x_min = 0, x_max = 0;
  int k_min = 0, k_max = 0;
  double observed_constant = 0.0;
  double configured_constant = 0.0;
  std::uint64_t worst_x = 0;
  int worst_k = 0;
  std::uint64_t points = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> extra;
};

/// Scanned constants shipped as defaults.
struct CalibratedConstants {
  double hardy_ramanujan_A = 1.70;    ///< with B = 1, x in [100, 1e7]
  double hardy_ramanujan_B = 1.0;
  double sathe_selberg_delta = 1.02;  ///< x in [100, 1e7], 1 <= k <= log log x
  double chebychev_lower_C = 3.0;     ///< 0.9212 y - C log y <= psi(y), y <= 1e7
  double chebychev_upper_C = 0.0;     ///< psi(y) <= 1.1056 y + C log^2 y, y <= 1e7
  std::uint64_t mertens_q_min = 3;    ///< product bound holds for q_min <= q <= 1e4 (fails at q = 2)
  double smooth_ratio = 51.0;         ///< #{n<=y : P(n) <= log^2 y} <= c y^{0.6}, y <= 1e7
};

/// #{n <= x : omega(n) = k} <= A x (log log x + B)^{k-1} / ((k-1)! log x)
/// at every integer x in [x_min, x_max] and every k >= 1.
BoundCheck hardy_ramanujan_check(const FactorTable& table, std::uint64_t x_min, std::uint64_t x_max,
                                 double B = 1.0, double configured_A = CalibratedConstants{}.hardy_ramanujan_A);

/// #{n <= x : omega = Omega = k} >= delta x (log log x)^{k-1} / ((k-1)! log x)
/// at every integer x in [max(x_min, 16), x_max] and 1 <= k <= log log x.
BoundCheck sathe_selberg_check(const FactorTable& table, std::uint64_t x_min, std::uint64_t x_max,
                               double configured_delta = CalibratedConstants{}.sathe_selberg_delta);

struct LocalRatio {
  std::uint64_t x = 0;
  int k = 0;
  double L = 0.0;
  double observed = 0.0;
  double predicted = 0.0;
  double relative_deviation = 0.0;  ///< observed / predicted - 1
};

/// #S_{k+1,x} / #S_{k,x} against L / k.
LocalRatio local_ratio_check(const FactorTable& table, std::uint64_t x, int k);

/// #S_{k,lambda x} / #S_{k,x} against lambda (1 + log lambda / log x)^{kbar - 1};
/// lambda x is rounded down.
LocalRatio local_scaling_check(const FactorTable& table, std::uint64_t x, int k, double lambda);

struct EulerProductValue {
  double value = 0.0;
  double half_width = 0.0;  ///< bound on the omitted primes' effect
  std::uint64_t cutoff = 0;
};

/// G(z) = prod_p (1 + z/p)(1 - 1/p)^z / Gamma(z + 1), truncated at primes
/// <= cutoff (cutoff <= table limit). Gamma via std::lgamma. The omitted
/// factor is exp(-(z^2+z) sum_{p>c} 1/(2p^2) + ...), bounded here by
/// half-width (z^2 + z) / (c log c) in log space.
EulerProductValue G_function(double z, const FactorTable& table, std::uint64_t cutoff);

/// d/dz log(z G(z)) by central difference with step h.
double G_log_derivative(double z, const FactorTable& table, std::uint64_t cutoff, double h = 1e-4);

struct ExcludedPrimeDensity {
  std::uint64_t x = 0;
  int k = 0;
  std::vector<std::uint64_t> excluded;
  double kbar = 0.0;
  std::uint64_t observed = 0;
  double euler_factor = 0.0;  ///< prod_{p in P} (1 + kbar/p)^{-1}
  double model = 0.0;         ///< main term with h = 0
  double ratio = 0.0;         ///< observed / model
};

/// Exact coprime count against the main term
///   G(kbar) prod_{p in P}(1 + kbar/p)^{-1} x (log log x)^{k-1} / ((k-1)! log x).
/// At most 8 excluded primes.
ExcludedPrimeDensity excluded_prime_density_check(const FactorTable& table, std::uint64_t x, int k,
                                                  const std::vector<std::uint64_t>& excluded,
                                                  std::uint64_t g_cutoff = 1'000'000);

/// Chebychev bracket for psi(y) = sum_{p^m <= y} log p over 2 <= y <= y_max,
/// and the product bound prod_{p<=q}(1 + R/p)^{-1} >= (2 log q)^{-R} for
/// constants.mertens_q_min <= q <= q_max and each R. Returns the lower, upper
/// and product checks; the product check also records, per R, the largest
/// q <= q_max at which the bound fails.
std::vector<BoundCheck> chebychev_mertens_check(const FactorTable& table, std::uint64_t y_max,
                                                std::uint64_t q_max = 10'000,
                                                const std::vector<int>& R_values = {1, 2, 4},
                                                const CalibratedConstants& constants = {});

/// #{n <= y : P(n) <= log^2 y} against c y^{1/2 + eps} for 2 <= y <= y_max.
BoundCheck smooth_count_check(const FactorTable& table, std::uint64_t y_max, double eps = 0.1,
                              double configured_c = CalibratedConstants{}.smooth_ratio);

/// #{n <= y : P(n) <= B} by scan (n = 1 included).
std::uint64_t smooth_count(const FactorTable& table, std::uint64_t y, std::uint64_t B);

}  // namespace rmf
