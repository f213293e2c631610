#include "rmf/assignment.hpp"

#include <json.hpp>

#include "rmf/errors.hpp"

namespace rmf {

namespace {
constexpr std::uint64_t kRademacherDomain = 0x5349474E53ull;  // one 64-bit word per 64 consecutive primes
constexpr std::uint64_t kPrimeDomain = 0x5052494D45ull;       // one stream per prime
}  // namespace

double epsilon_value(const EpsilonModel& model, std::uint64_t seed, std::uint64_t p,
                     std::size_t prime_index) {
  if (model.is_rademacher()) {
    const std::uint64_t word = CounterRng(seed, 0, kRademacherDomain).at(prime_index >> 6);
    return ((word >> (prime_index & 63)) & 1) ? 1.0 : -1.0;
  }
  CounterRng rng(seed, p, kPrimeDomain);
  return model.component_for(prime_index).draw(rng);
}

void fill_epsilons(const EpsilonModel& model, std::uint64_t seed,
                   std::span<const std::uint32_t> primes, std::span<double> out) {
  if (out.size() < primes.size()) throw InvalidArgument("fill_epsilons: output too small");
  if (model.is_rademacher()) {
    const CounterRng words(seed, 0, kRademacherDomain);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if ((i & 63) == 0) word = words.at(i >> 6);
      out[i] = ((word >> (i & 63)) & 1) ? 1.0 : -1.0;
    }
    return;
  }
  for (std::size_t i = 0; i < primes.size(); ++i) {
    CounterRng rng(seed, primes[i], kPrimeDomain);
    out[i] = model.component_for(i).draw(rng);
  }
}

void fill_rademacher_words(std::uint64_t seed, std::span<std::uint64_t> out) {
  const CounterRng words(seed, 0, kRademacherDomain);
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = words.at(w);
}

EpsilonAssignment sample_assignment(const EpsilonModel& model, const FactorTable& table,
                                    std::uint64_t x, std::uint64_t seed) {
  if (x < 2) throw InvalidArgument("assignment limit must be >= 2");
  if (x > table.limit()) throw InvalidArgument("assignment limit exceeds factor table");
  model.validate();
  auto primes = table.primes().first(table.prime_count(x));
  std::vector<double> values(primes.size());
  fill_epsilons(model, seed, primes, values);
  return EpsilonAssignment(model, x, seed, std::move(values));
}

EpsilonAssignment fixed_assignment(const FactorTable& table, std::uint64_t x, std::vector<double> values,
                                   EpsilonModel model) {
  if (x < 2 || x > table.limit()) throw InvalidArgument("assignment limit out of range");
  if (values.size() != table.prime_count(x)) {
    throw InvalidArgument("fixed assignment needs exactly pi(x) = " + std::to_string(table.prime_count(x)) +
                          " values, got " + std::to_string(values.size()));
  }
  return EpsilonAssignment(std::move(model), x, 0, std::move(values));
}

std::string EpsilonAssignment::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model_.spec();
  j["seed"] = seed_;
  j["limit"] = limit_;
  return j.dump();
}

EpsilonAssignment EpsilonAssignment::from_json(const std::string& text, const FactorTable& table) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return sample_assignment(EpsilonModel::parse(j.at("model").get<std::string>()), table,
                             j.at("limit").get<std::uint64_t>(), j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad assignment JSON: ") + e.what());
  }
}

}  // namespace rmf
