#pragma once

#include <optional>
#include <string>

#include "retailopt/pipeline.hpp"
#include "retailopt/synth.hpp"
#include "retailopt/types.hpp"

namespace retailopt {

// All parsers are strict: wrong types and (for config files) unknown keys
// raise std::runtime_error naming the offending field.

Session parse_session(const std::string& json_text);
std::string session_to_json(const Session& session);

RunConfig parse_run_config(const std::string& json_text);
ScenarioConfig parse_scenario_config(const std::string& json_text);

std::string estimate_to_json(const EstimateResult& est, std::optional<double> runtime_ms);
EstimateResult parse_estimate(const std::string& json_text);

std::string read_text_file(const std::string& path);
// Write-then-rename so failures never leave partial files behind.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace retailopt
