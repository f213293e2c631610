#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rmf/clt.hpp"
#include "rmf/conditional.hpp"
#include "rmf/moments.hpp"
#include "rmf/nt_estimates.hpp"
#include "rmf/stats.hpp"

namespace rmf {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "rmflab";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exact integers wider than 64 bits are written as decimal strings.
Json u128_json(u128 v);

Json to_json(const MomentReport& r);
Json to_json(const std::vector<Table1Row>& rows);
Json to_json(const DistributionReport& r);
Json to_json(const McLeishReport& r);
Json to_json(const ChatterjeeSplit& r);
Json to_json(const BoundCheck& c);
Json to_json(const LocalRatio& r);
Json to_json(const ExcludedPrimeDensity& d);
Json to_json(const EulerProductValue& g);
Json to_json(const GaussianTruncation& g);
Json to_json(const AsymptoticParams& p);

/// {"tool", "version", "command", "config", "table_limit", "seed", "result"}.
Json envelope(const std::string& command, Json config, std::uint64_t table_limit, std::uint64_t seed, Json result);

/// Writes `text` to a temporary file beside `path`, then renames it over
/// `path`.
void write_atomic(const std::string& path, const std::string& text);

/// Round half to even at `decimals` places, as text.
std::string round_half_even(double v, int decimals);

}  // namespace rmf
