#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specflow/geometry.hpp"
#include "specflow/partial_actions.hpp"
#include "specflow/report.hpp"

namespace specflow {

inline constexpr int kReportSchema = 1;

nlohmann::json to_json(const QVec& v);
nlohmann::json to_json(const Box& b);
nlohmann::json to_json(const Region& r);
nlohmann::json to_json(const PASequence& seq);
nlohmann::json to_json(const CheckResult& c);

Box box_from_json(const nlohmann::json& j);
Region region_from_json(const nlohmann::json& j);

// {schema, command, status, config, checks, artifacts[, timing]}. Leaving
// out the wall-clock time makes equal runs produce equal text.
nlohmann::json report_json(const Report& r, const nlohmann::json& config, const std::vector<std::string>& artifacts,
                           std::optional<double> wall_seconds = std::nullopt);
std::string dump_report(const nlohmann::json& j);

}  // namespace specflow
