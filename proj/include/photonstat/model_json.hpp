#pragma once

#include "photonstat/model.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace photonstat {

/// Schema or syntax problem in a config document. `where` is a dotted field
/// path for schema errors and "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& message)
        : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

nlohmann::json to_json(const ExperimentConfig& config);

/// Strict decoding: every field is required and unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Parses JSON text, reporting syntax errors with line and column.
nlohmann::json parse_json_text(const std::string& text);

/// Applies a dotted-path override such as "emitter.tau_fast=1.7" or
/// "detectors.1.efficiency=0.2". The value is parsed as JSON when possible
/// and taken as a string otherwise. The path must already exist.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// SHA-256 (hex) of the canonical serialisation of the config.
std::string config_digest(const ExperimentConfig& config);

}  // namespace photonstat
