#pragma once

#include <stdexcept>
#include <string>

#include "marketsim/simulator.hpp"

namespace marketsim {

/// Scenario file problem; `path` is the offending field path ("agents[2].type").
struct ConfigError : std::runtime_error {
    std::string path;
    ConfigError(std::string p, const std::string& what)
        : std::runtime_error(what + " at " + p), path(std::move(p)) {}
};

Scenario load_scenario(const std::string& file_path);
Scenario parse_scenario(const std::string& json_text);

/// Semantic checks beyond the schema (positive price, >=1 agent, ...).
/// Throws ConfigError naming the field.
void validate_scenario(const Scenario& scenario);

/// Canonical serialization of every behavior-affecting key; the manifest
/// digest is a hash of this string.
std::string scenario_canonical_json(const Scenario& scenario);
std::string scenario_digest(const Scenario& scenario);

}  // namespace marketsim
