#pragma once

#include <string>

#include "beamfrac/scenarios.hpp"

namespace beamfrac {

/// Parses a sectioned key = value config document into a ScenarioConfig.
/// Rejects unknown sections and keys, duplicates, malformed numbers and keys
/// that do not belong to the declared scenario, each with its line number.
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a config file. Throws IoError when unreadable.
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization; parse(serialize(cfg)) reproduces cfg exactly
/// (doubles are written with round-trip precision).
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace beamfrac
