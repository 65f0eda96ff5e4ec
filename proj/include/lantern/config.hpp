#pragma once

#include "lantern/devicesim.hpp"
#include "lantern/engine.hpp"
#include "lantern/perception.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace lantern::config {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int control_port = 7421;
    int ws_port = 7422;
    int telemetry_every = 5;
    int queue_frames = 256;
    double accel = 1.0;  ///< simulated seconds per wall second; 0 runs unpaced
};

/// Everything the stack reads from its configuration file.
struct StackConfig {
    devicesim::DeviceConfig device;
    engine::EngineConfig engine;
    perception::GestureConfig gestures;
    perception::OnsetConfig onsets;
    ServiceConfig service;
    std::map<std::string, Params> behavior_params;  ///< [behavior.<id>] overrides
};

/// Flat `section.key -> raw value` view of an INI/TOML-style file:
/// `[section]` headers, `key = value` lines, `#` comments, optional quotes.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source = "config");

/// Parses and validates. ConfigError messages name the offending key.
StackConfig parse_config(std::istream& in, const std::string& source = "config");
StackConfig load_config(const std::string& path);

/// Checks cross-module invariants (shell geometry, tick, ports, ...).
void validate(const StackConfig& cfg);

/// Built-in behaviors with the file's [behavior.<id>] overrides applied.
std::vector<behaviors::BehaviorDef> apply_behavior_overrides(std::vector<behaviors::BehaviorDef> defs,
                                                             const StackConfig& cfg);

}  // namespace lantern::config
