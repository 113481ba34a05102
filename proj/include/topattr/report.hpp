#pragma once

// JSON rendering of analysis results. Key order is fixed, doubles print in
// shortest round-trip form, and nothing time-dependent is emitted.

#include <string>
#include <vector>

#include <json.hpp>

#include "topattr/attractor.hpp"
#include "topattr/hutchinson.hpp"

namespace topattr {

using Json = nlohmann::ordered_json;

std::string describe_cell(const Grid& grid, CellKey k);
Json point_json(const Point& p);
Json params_json(const AnalysisParams& params);
// `box_paths` holds one CSV path per attractor; `remainder_path` may be empty.
Json analysis_json(const MapSpec& map, const AnalysisParams& params, const Decomposition& d,
                   const std::vector<std::string>& box_paths, const std::string& remainder_path);
Json fiber_constants_json(const FiberConstants& c);
Json property_report_json(const PropertyReport& r);
Json word_search_json(const WordSearchResult& r);

}  // namespace topattr
