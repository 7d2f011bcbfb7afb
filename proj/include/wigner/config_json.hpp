#pragma once

#include <string>

#include <json.hpp>

#include "wigner/mc.hpp"

namespace wigner::io {

// Parse an experiment configuration from a flat JSON object. Unknown keys
// are rejected so that typos fail loudly instead of silently running the
// defaults. Throws mc::ConfigError naming the offending key.
mc::ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const mc::ExperimentConfig& config);

// Load a config from a file. A run manifest (an object with a "config"
// member) is accepted as-is, so a finished run can be replayed directly
// from its own manifest.
mc::ExperimentConfig load_config_file(const std::string& path);

}  // namespace wigner::io
