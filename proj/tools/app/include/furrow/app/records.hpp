#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "furrow/matcher.hpp"

namespace furrow::app {

/// One JSON-lines record per detected frame:
/// {"frame", "a", "b", "c", "inlier_ratio", "candidate_count", "status"}.
nlohmann::json model_record(std::string_view frame, const FurrowEdgeModel& model);

/// Reads the curve and fit statistics back from a record. Inlier indices are
/// not serialized and come back empty.
FurrowEdgeModel model_from_record(const nlohmann::json& record);

/// Parses one line; throws Error(kFormat) on malformed input.
nlohmann::json parse_record_line(std::string_view line);

}  // namespace furrow::app
