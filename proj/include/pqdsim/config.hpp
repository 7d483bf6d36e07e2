#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pqdsim/experiment.hpp"

namespace pqdsim {

/// Experiment config from JSON. Relative "lon.file" paths resolve against base_dir.
/// Schema and invariant violations throw ConfigError naming the field.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});

ExperimentConfig parse_config(const std::filesystem::path& path);

/// Canonical JSON form: explicit ports, per-mode detectors, matrices inline.
nlohmann::json config_to_json(const ExperimentConfig& config);

std::string sha256_hex(std::string_view data);

/// SHA-256 of the canonical JSON (keys sorted, file provenance dropped).
std::string config_hash(const ExperimentConfig& config);

}  // namespace pqdsim
