#pragma once

#include <string>

#include "cft/harness.hpp"

namespace cft {

/// Parses a scenario JSON document; throws kConfigInvalid naming the field.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
/// Canonical JSON form; parse_config(dump_config(c)) == c.
std::string dump_config(const ScenarioConfig& config);

}  // namespace cft
