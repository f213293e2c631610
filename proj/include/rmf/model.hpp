#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rmf/rng.hpp"

namespace rmf {

struct Atom {
  double value = 0.0;
  double probability = 0.0;
};

/// One symmetric, unit-variance law for epsilon_p.
struct Component {
  enum class Kind { Rademacher, Gaussian, ThreePoint, Uniform, Discrete };

  Kind kind = Kind::Rademacher;
  double a = 0.0;            ///< ThreePoint: support {-a, 0, a}, P(+-a) = 1/(2a^2)
  std::vector<Atom> atoms;   ///< Discrete only

  double second_moment() const;
  double fourth_moment() const;
  double draw(CounterRng& rng) const;
  std::string name() const;
};

enum class ModelKind { Rademacher, GaussianUnit, Custom };

/// Distribution family for the epsilon_p: symmetric, E eps^2 = 1,
/// E eps^4 <= C. Custom models may alternate several components across
/// primes (component i % n is used for the i-th prime), so the epsilon_p
/// need not be identically distributed.
class EpsilonModel {
 public:
  static EpsilonModel rademacher();
  static EpsilonModel gaussian();
  /// Symmetric three-point law on {-a, 0, a}; E eps^4 = a^2. Needs a >= 1.
  static EpsilonModel three_point(double a);
  /// Uniform on [-sqrt 3, sqrt 3]; E eps^4 = 9/5.
  static EpsilonModel uniform();
  /// three_point(2) on even-indexed primes, uniform on odd-indexed ones.
  static EpsilonModel alternating();
  /// Arbitrary finite law; validated on construction.
  static EpsilonModel discrete(std::vector<Atom> atoms, double fourth_moment_bound,
                               std::string name = "discrete");

  /// Accepts: rademacher | gaussian | custom:three-point[:a] | custom:uniform |
  /// custom:alternating. Throws ModelInvalid.
  static EpsilonModel parse(std::string_view spec);

  ModelKind kind() const noexcept { return kind_; }
  /// Canonical spec string; parse(spec()) reproduces built-in models.
  const std::string& spec() const noexcept { return spec_; }
  double fourth_moment_bound() const noexcept { return bound_; }
  std::span<const Component> components() const noexcept { return components_; }
  const Component& component_for(std::size_t prime_index) const {
    return components_[prime_index % components_.size()];
  }
  /// Every realisation takes values in {-1, +1}.
  bool is_rademacher() const noexcept { return kind_ == ModelKind::Rademacher; }

  /// Throws ModelInvalid unless symmetric, normalised and within the bound.
  void validate() const;

 private:
  ModelKind kind_ = ModelKind::Rademacher;
  std::string spec_;
  std::vector<Component> components_;
  double bound_ = 1.0;
};

}  // namespace rmf
