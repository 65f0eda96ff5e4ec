#pragma once

#include "lantern/config.hpp"
#include "lantern/engine.hpp"
#include "lantern/perception.hpp"
#include "lantern/telemetry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lantern::runner {

struct RunOptions {
    std::string behavior;
    Params params;
    std::optional<double> duration_s;  ///< unset: run until the engine is idle again
    double max_duration_s = 7200.0;
    double accel = 0.0;  ///< 0 runs as fast as possible
    std::optional<perception::SensorTrace> sensors;
    double sensors_at_s = 0.0;  ///< simulated time at which the trace starts
    std::optional<behaviors::AudioClip> audio;
};

struct RunResult {
    std::vector<telemetry::Row> rows;
    std::vector<engine::Notice> notices;
    bool finished = false;  ///< behavior completed on its own
};

/// Thrown for a behavior id that is not registered; what() lists the registry.
class UnknownBehavior : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Runs one behavior on the embedded simulator. Rows are written to `csv`
/// (header first) as they are produced, and also kept in the result unless
/// `keep_rows` is false.
RunResult run(const config::StackConfig& cfg, const RunOptions& opts, std::ostream* csv = nullptr,
              bool keep_rows = true);

/// Registry used by run(): built-ins plus the config's overrides.
std::vector<behaviors::BehaviorDef> registry(const config::StackConfig& cfg,
                                             std::optional<behaviors::AudioClip> audio = std::nullopt);

}  // namespace lantern::runner
