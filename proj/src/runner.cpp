#include "lantern/runner.hpp"

#include "lantern/devicesim.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

namespace lantern::runner {

std::vector<behaviors::BehaviorDef> registry(const config::StackConfig& cfg, std::optional<behaviors::AudioClip> audio) {
    return config::apply_behavior_overrides(behaviors::builtin_definitions(std::move(audio)), cfg);
}

RunResult run(const config::StackConfig& cfg, const RunOptions& opts, std::ostream* csv, bool keep_rows) {
    auto defs = registry(cfg, opts.audio);
    bool known = false;
    std::string ids;
    for (const auto& d : defs) {
        known |= d.id == opts.behavior;
        ids += (ids.empty() ? "" : ", ") + d.id;
    }
    if (!known) throw UnknownBehavior("unknown behavior '" + opts.behavior + "'; available: " + ids);

    engine::Engine eng(cfg.engine, std::move(defs));
    devicesim::Device device(cfg.device);
    const int tick = cfg.engine.tick_ms;

    if (auto r = eng.start(opts.behavior, opts.params); !r.ok()) throw ConfigError(r.message);

    std::optional<devicesim::SensorReplay> replay;
    if (opts.sensors)
        replay.emplace(*opts.sensors, cfg.gestures, static_cast<std::int64_t>(std::llround(opts.sensors_at_s * 1000.0)));

    const double limit_s = opts.duration_s.value_or(opts.max_duration_s);
    const auto ticks = static_cast<std::int64_t>(std::llround(limit_s * 1000.0 / tick));

    using clock = std::chrono::steady_clock;
    const auto wall_start = clock::now();
    const double wall_per_tick_ms = opts.accel > 0.0 ? tick / opts.accel : 0.0;

    RunResult result;
    if (csv) telemetry::write_header(*csv);
    for (std::int64_t k = 1; k <= ticks; ++k) {
        // Sensor evidence up to the coming tick is queued before it runs.
        if (replay) devicesim::deliver(eng, replay->advance_to(eng.clock_ms() + tick));
        const auto frame = eng.tick();
        const auto& state = device.apply(frame);
        auto row = telemetry::make_row(frame, state);
        if (csv) telemetry::write_row(*csv, row);
        if (keep_rows) result.rows.push_back(std::move(row));
        for (auto& n : eng.take_notices()) {
            if (n.kind == engine::Notice::Kind::finished && n.behavior == opts.behavior) result.finished = true;
            result.notices.push_back(std::move(n));
        }
        if (wall_per_tick_ms > 0.0)
            std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<clock::duration>(
                                                           std::chrono::duration<double, std::milli>(k * wall_per_tick_ms)));
        if (!opts.duration_s && eng.idle()) break;
    }
    return result;
}

}  // namespace lantern::runner
