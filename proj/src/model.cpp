#include "rmf/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "rmf/errors.hpp"

namespace rmf {

namespace {

constexpr double kMomentTolerance = 1e-12;
const double kSqrt3 = std::sqrt(3.0);

Component component_of(Component::Kind kind) {
  Component c;
  c.kind = kind;
  return c;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void check_component(const Component& c) {
  using K = Component::Kind;
  switch (c.kind) {
    case K::Rademacher:
    case K::Gaussian:
    case K::Uniform:
      return;
    case K::ThreePoint:
      if (!std::isfinite(c.a) || c.a < 1.0) {
        throw ModelInvalid("three-point model needs a >= 1 (P(0) = 1 - 1/a^2), got a=" + format_double(c.a));
      }
      return;
    case K::Discrete: {
      if (c.atoms.empty()) throw ModelInvalid("discrete model has no atoms");
      double total = 0.0;
      std::map<double, double> mass;
      for (const auto& atom : c.atoms) {
        if (!std::isfinite(atom.value) || !(atom.probability >= 0.0)) {
          throw ModelInvalid("discrete model atom must have finite value and probability >= 0");
        }
        total += atom.probability;
        mass[atom.value] += atom.probability;
      }
      if (std::abs(total - 1.0) > kMomentTolerance) throw ModelInvalid("discrete model probabilities must sum to 1");
      for (auto [v, w] : mass) {
        auto it = mass.find(-v);
        const double mirrored = it == mass.end() ? 0.0 : it->second;
        if (std::abs(mirrored - w) > kMomentTolerance) {
          throw ModelInvalid("model is not symmetric: P(eps=" + format_double(v) + ") != P(eps=" +
                             format_double(-v) + ")");
        }
      }
      if (std::abs(c.second_moment() - 1.0) > kMomentTolerance) {
        throw ModelInvalid("model must satisfy E eps^2 = 1, got " + format_double(c.second_moment()));
      }
      return;
    }
  }
}

}  // namespace

double Component::second_moment() const {
  if (kind != Kind::Discrete) return 1.0;
  double m = 0.0;
  for (const auto& atom : atoms) m += atom.probability * atom.value * atom.value;
  return m;
}

double Component::fourth_moment() const {
  switch (kind) {
    case Kind::Rademacher: return 1.0;
    case Kind::Gaussian: return 3.0;
    case Kind::ThreePoint: return a * a;
    case Kind::Uniform: return 9.0 / 5.0;
    case Kind::Discrete: {
      double m = 0.0;
      for (const auto& atom : atoms) m += atom.probability * std::pow(atom.value, 4);
      return m;
    }
  }
  return 0.0;
}

double Component::draw(CounterRng& rng) const {
  switch (kind) {
    case Kind::Rademacher: return (rng.next() >> 63) ? 1.0 : -1.0;
    case Kind::Gaussian: return rng.normal();
    case Kind::ThreePoint: {
      const double tail = 0.5 / (a * a);
      const double u = rng.uniform();
      if (u < tail) return -a;
      if (u < 2.0 * tail) return a;
      return 0.0;
    }
    case Kind::Uniform: return (2.0 * rng.uniform() - 1.0) * kSqrt3;
    case Kind::Discrete: {
      const double u = rng.uniform();
      double acc = 0.0;
      for (const auto& atom : atoms) {
        acc += atom.probability;
        if (u < acc) return atom.value;
      }
      return atoms.back().value;
    }
  }
  return 0.0;
}

std::string Component::name() const {
  switch (kind) {
    case Kind::Rademacher: return "rademacher";
    case Kind::Gaussian: return "gaussian";
    case Kind::ThreePoint: return "three-point:" + format_double(a);
    case Kind::Uniform: return "uniform";
    case Kind::Discrete: return "discrete";
  }
  return "?";
}

EpsilonModel EpsilonModel::rademacher() {
  EpsilonModel m;
  m.kind_ = ModelKind::Rademacher;
  m.spec_ = "rademacher";
  m.components_ = {component_of(Component::Kind::Rademacher)};
  m.bound_ = 1.0;
  return m;
}

EpsilonModel EpsilonModel::gaussian() {
  EpsilonModel m;
  m.kind_ = ModelKind::GaussianUnit;
  m.spec_ = "gaussian";
  m.components_ = {component_of(Component::Kind::Gaussian)};
  m.bound_ = 3.0;
  return m;
}

EpsilonModel EpsilonModel::three_point(double a) {
  EpsilonModel m;
  m.kind_ = ModelKind::Custom;
  m.spec_ = "custom:three-point:" + format_double(a);
  Component c = component_of(Component::Kind::ThreePoint);
  c.a = a;
  m.components_ = {c};
  check_component(c);
  m.bound_ = c.fourth_moment();
  return m;
}

EpsilonModel EpsilonModel::uniform() {
  EpsilonModel m;
  m.kind_ = ModelKind::Custom;
  m.spec_ = "custom:uniform";
  m.components_ = {component_of(Component::Kind::Uniform)};
  m.bound_ = 9.0 / 5.0;
  return m;
}

EpsilonModel EpsilonModel::alternating() {
  EpsilonModel m;
  m.kind_ = ModelKind::Custom;
  m.spec_ = "custom:alternating";
  Component tp = component_of(Component::Kind::ThreePoint);
  tp.a = 2.0;
  m.components_ = {tp, component_of(Component::Kind::Uniform)};
  m.bound_ = 4.0;
  return m;
}

EpsilonModel EpsilonModel::discrete(std::vector<Atom> atoms, double fourth_moment_bound, std::string name) {
  EpsilonModel m;
  m.kind_ = ModelKind::Custom;
  m.spec_ = "custom:" + std::move(name);
  Component c = component_of(Component::Kind::Discrete);
  c.atoms = std::move(atoms);
  m.components_ = {std::move(c)};
  m.bound_ = fourth_moment_bound;
  m.validate();
  return m;
}

EpsilonModel EpsilonModel::parse(std::string_view spec) {
  if (spec == "rademacher") return rademacher();
  if (spec == "gaussian") return gaussian();
  if (spec == "custom:uniform") return uniform();
  if (spec == "custom:alternating") return alternating();
  constexpr std::string_view tp = "custom:three-point";
  if (spec.substr(0, tp.size()) == tp) {
    auto rest = spec.substr(tp.size());
    if (rest.empty()) return three_point(2.0);
    if (rest.front() != ':') throw ModelInvalid("unknown model: " + std::string(spec));
    rest.remove_prefix(1);
    double a = 0.0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), a);
    if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
      throw ModelInvalid("bad three-point parameter: " + std::string(rest));
    }
    return three_point(a);
  }
  throw ModelInvalid("unknown model: " + std::string(spec) +
                     " (expected rademacher, gaussian, custom:three-point[:a], custom:uniform, "
                     "custom:alternating)");
}

void EpsilonModel::validate() const {
  if (components_.empty()) throw ModelInvalid("model has no components");
  double worst = 0.0;
  for (const auto& c : components_) {
    check_component(c);
    worst = std::max(worst, c.fourth_moment());
  }
  if (!(worst <= bound_ * (1.0 + kMomentTolerance))) {
    throw ModelInvalid("E eps^4 = " + format_double(worst) + " exceeds declared bound C = " +
                       format_double(bound_));
  }
}

}  // namespace rmf
