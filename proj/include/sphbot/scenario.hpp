#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "sphbot/simulation.hpp"

namespace sphbot {

/// A complete simulation scenario as read from a config file.
///
/// Config files are JSON objects. Field names carry their units
/// (`_kg`, `_m`, `_s`, `_rad`, `_deg`, `_rad_s`, ...); `_deg` values are
/// converted to radians on load. Unknown keys are rejected at every level.
struct ScenarioConfig {
  SimulationSetup setup;
  double settle_margin = 1.0;  ///< s, used by the phase analysis
};

/// Throws ValidationError with the offending field's path.
ScenarioConfig parse_scenario(const nlohmann::json& doc);

/// Reads and parses a config file. Throws ValidationError for unreadable or
/// malformed files.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Canonical JSON form of a scenario with every field spelled out. Parsing it
/// back gives the same scenario up to rounding in the degree conversion.
nlohmann::ordered_json scenario_to_json(const ScenarioConfig& config);

}  // namespace sphbot
