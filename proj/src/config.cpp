#include "lantern/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>

namespace lantern::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& raw) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + raw + "'");
    }
}

int to_int(const std::string& key, const std::string& raw) {
    const double v = to_number(key, raw);
    if (v != std::floor(v)) throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    return static_cast<int>(v);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> out;
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // A '#' inside quotes is part of the value.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.erase(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        const auto full = section.empty() ? key : section + "." + key;
        if (out.contains(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
        out[full] = value;
    }
    return out;
}

StackConfig parse_config(std::istream& in, const std::string& source) {
    const auto kv = parse_key_values(in, source);
    StackConfig cfg;
    std::optional<double> max_compression;

    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto num = [](double& field) -> Setter { return [&field](auto& k, auto& v) { field = to_number(k, v); }; };
    auto integer = [](int& field) -> Setter { return [&field](auto& k, auto& v) { field = to_int(k, v); }; };

    auto& shell = cfg.device.shell;
    auto& g = cfg.gestures;
    auto& o = cfg.onsets;
    auto& s = cfg.service;
    const std::map<std::string, Setter> setters = {
        {"device.shell.strip_length_mm", num(shell.strip_length_mm)},
        {"device.shell.strip_count", integer(shell.strip_count)},
        {"device.shell.attach_radius_mm", num(shell.attach_radius_mm)},
        {"device.shell.pulley_radius_mm", num(shell.pulley_radius_mm)},
        {"device.shell.max_compression_mm", [&](auto& k, auto& v) { max_compression = to_number(k, v); }},
        {"device.max_speed_rad_s", num(cfg.device.max_speed_rad_s)},
        {"device.pixel_count", integer(cfg.device.pixel_count)},
        {"device.supply_v", num(cfg.device.supply_v)},
        {"device.imu_noise_g", num(cfg.device.imu_noise_g)},
        {"device.seed", [&](auto& k, auto& v) { cfg.device.rng_seed = static_cast<std::uint64_t>(to_int(k, v)); }},
        {"engine.tick_ms", integer(cfg.engine.tick_ms)},
        {"engine.ramp_s", num(cfg.engine.ramp_s)},
        {"perception.tilt_enter_deg", num(g.tilt_enter_deg)},
        {"perception.tilt_exit_deg", num(g.tilt_exit_deg)},
        {"perception.tilt_window_s", num(g.tilt_window_s)},
        {"perception.two_tilt_window_s", num(g.two_tilt_window_s)},
        {"perception.flip_hold_s", num(g.flip_hold_s)},
        {"perception.refractory_s", num(g.refractory_s)},
        {"perception.reference_window_s", num(g.reference_window_s)},
        {"perception.onset_threshold_ratio", num(o.threshold_ratio)},
        {"perception.onset_history_frames", integer(o.history_frames)},
        {"perception.onset_refractory_s", num(o.refractory_s)},
        {"perception.bass_cutoff_hz", num(o.bass_cutoff_hz)},
        {"perception.bass_min_share", num(o.bass_min_share)},
        {"service.host", [&](auto&, auto& v) { s.host = v; }},
        {"service.control_port", integer(s.control_port)},
        {"service.ws_port", integer(s.ws_port)},
        {"service.telemetry_every", integer(s.telemetry_every)},
        {"service.queue_frames", integer(s.queue_frames)},
        {"service.accel", num(s.accel)},
    };

    for (const auto& [key, value] : kv) {
        if (key.starts_with("behavior.")) {
            const auto rest = key.substr(9);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos || dot == 0) throw ConfigError(key + ": expected behavior.<id>.<param>");
            cfg.behavior_params[rest.substr(0, dot)][rest.substr(dot + 1)] = to_number(key, value);
            continue;
        }
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(key + ": unknown configuration key");
        it->second(key, value);
    }

    shell.max_compression_mm = max_compression.value_or(0.35 * shell.strip_length_mm);
    cfg.device.tick_ms = cfg.engine.tick_ms;
    cfg.engine.pixel_count = cfg.device.pixel_count;
    validate(cfg);
    if (!cfg.behavior_params.empty()) apply_behavior_overrides(behaviors::builtin_definitions(), cfg);
    return cfg;
}

StackConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

void validate(const StackConfig& cfg) {
    cfg.device.validate();
    if (cfg.engine.tick_ms <= 0) throw ConfigError("engine.tick_ms must be > 0");
    if (!(cfg.engine.ramp_s >= 0.0)) throw ConfigError("engine.ramp_s must be >= 0");
    const auto& g = cfg.gestures;
    if (!(g.tilt_exit_deg > 0 && g.tilt_exit_deg < g.tilt_enter_deg && g.tilt_enter_deg < 90))
        throw ConfigError("perception.tilt_exit_deg must be > 0 and below perception.tilt_enter_deg (< 90)");
    if (!(g.tilt_window_s > 0 && g.two_tilt_window_s > 0 && g.flip_hold_s > 0 && g.refractory_s >= 0 &&
          g.reference_window_s > 0))
        throw ConfigError("perception gesture windows must be positive");
    const auto& o = cfg.onsets;
    if (!(o.threshold_ratio > 1.0)) throw ConfigError("perception.onset_threshold_ratio must be > 1");
    if (o.history_frames < 1) throw ConfigError("perception.onset_history_frames must be >= 1");
    if (!(o.bass_cutoff_hz > 0)) throw ConfigError("perception.bass_cutoff_hz must be > 0");
    if (!(o.bass_min_share >= 0 && o.bass_min_share <= 1)) throw ConfigError("perception.bass_min_share must be in [0, 1]");
    const auto& s = cfg.service;
    auto port_ok = [](int p) { return p >= 0 && p <= 65535; };
    if (!port_ok(s.control_port)) throw ConfigError("service.control_port out of range");
    if (!port_ok(s.ws_port)) throw ConfigError("service.ws_port out of range");
    if (s.telemetry_every < 1) throw ConfigError("service.telemetry_every must be >= 1");
    if (s.queue_frames < 1) throw ConfigError("service.queue_frames must be >= 1");
    if (!(s.accel >= 0)) throw ConfigError("service.accel must be >= 0");
}

std::vector<behaviors::BehaviorDef> apply_behavior_overrides(std::vector<behaviors::BehaviorDef> defs,
                                                             const StackConfig& cfg) {
    for (const auto& [id, overrides] : cfg.behavior_params) {
        auto it = std::find_if(defs.begin(), defs.end(), [&](const auto& d) { return d.id == id; });
        if (it == defs.end()) throw ConfigError("behavior." + id + ": unknown behavior");
        Params merged = it->defaults;
        for (const auto& [k, v] : overrides) {
            if (!merged.contains(k)) throw ConfigError("behavior." + id + "." + k + ": unknown parameter");
            merged[k] = v;
        }
        // Build once so bad values fail at load time, except where audio is missing.
        if (id != "speaker") it->make(merged);
        it->defaults = std::move(merged);
    }
    return defs;
}

}  // namespace lantern::config
