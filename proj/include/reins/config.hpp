#pragma once

#include <stdexcept>
#include <string>

#include "reins/model.hpp"

namespace reins {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, std::string key)
        : std::runtime_error(msg), key_path(std::move(key)) {}
    std::string key_path;
};

/// Parses the JSON configuration document. Every key is optional and defaults
/// to the shipped baseline; unknown keys are rejected with their full path.
ModelBundle parse_config_text(const std::string& json_text);

/// Reads and parses a configuration file.
ModelBundle load_config(const std::string& path);

/// Serializes a bundle back to the same schema (fully explicit).
std::string config_to_json(const ModelBundle& bundle);

}  // namespace reins
