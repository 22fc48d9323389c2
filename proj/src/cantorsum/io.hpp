#pragma once

// Text formats: IFS description files, witness reports and CSV tables.

#include "cantorsum/measure_oracle.hpp"
#include "cantorsum/projection_atlas.hpp"

#include <json.hpp>

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cantorsum {

using Json = nlohmann::ordered_json;

/// Parses an IFS description; errors are ParseError with the offending field path.
SumSystem parse_sum_system(std::string_view text);
SumSystem load_sum_system(const std::string& path);

Json system_to_json(const AffineCantorSystem& system);
Json sum_summary(const SumSystem& sum);

Json square_to_json(const SumSystem& sum, const CylinderSquare& sq);
Json witness_to_json(const SumSystem& sum, const WitnessPair& pair);
/// Rebuilds the pair from its words and epsilon/delta; the caller re-verifies.
WitnessPair witness_from_json(const SumSystem& sum, const Json& j);

/// CSV tables. Each begins with a "# config: {...}" line.
std::string atlas_csv(const std::vector<AtlasRecord>& records, const Json& config);
std::string region_csv(const std::vector<RegionCell>& cells, const Json& config);
std::string covering_csv(const std::vector<std::pair<double, double>>& rows, const Json& config);
std::string density_csv(const std::vector<std::array<double, 3>>& rows, const Json& config);

std::string read_text_file(const std::string& path);

}  // namespace cantorsum
