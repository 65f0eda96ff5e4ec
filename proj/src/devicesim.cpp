#include "lantern/devicesim.hpp"

#include <algorithm>
#include <cmath>

namespace lantern::devicesim {

void DeviceConfig::validate() const {
    shell.validate();
    if (!(max_speed_rad_s > 0.0)) throw ConfigError("device.max_speed_rad_s must be > 0");
    if (pixel_count <= 0) throw ConfigError("device.pixel_count must be > 0");
    if (!(supply_v > 0.0)) throw ConfigError("device.supply_v must be > 0");
    if (!(imu_noise_g >= 0.0)) throw ConfigError("device.imu_noise_g must be >= 0");
    if (tick_ms <= 0) throw ConfigError("engine.tick_ms must be > 0");
}

Device::Device(DeviceConfig cfg) : cfg_(cfg), rng_(cfg.rng_seed) {
    cfg_.validate();
    state_.servo = {cfg_.max_speed_rad_s, cfg_.shell.max_servo_angle_rad(), 0.0};
    state_.led.assign(static_cast<std::size_t>(cfg_.pixel_count), Rgb{});
    state_.geometry = kinematics::geometry_at(0.0, cfg_.shell);
    state_.supply_v = cfg_.supply_v;
    state_.rng_seed = cfg_.rng_seed;
}

const DeviceState& Device::apply(const engine::ActuatorFrame& frame) {
    auto& servo = state_.servo;
    const double target = std::clamp(frame.servo_compression, 0.0, 1.0) * servo.max_angle_rad;
    const double max_step = servo.max_speed_rad_s * cfg_.tick_ms / 1000.0;
    const double step = std::clamp(target - servo.position_rad, -max_step, max_step);
    servo.position_rad += step;
    state_.servo_travel_rad += std::abs(step);

    const double height = kinematics::servo_to_height(std::max(0.0, servo.position_rad), cfg_.shell);
    state_.geometry = kinematics::geometry_at(kinematics::height_to_compression(height, cfg_.shell), cfg_.shell);

    state_.vibration_amplitude = std::clamp(frame.vibration_amplitude, 0.0, 1.0);
    for (std::size_t i = 0; i < state_.led.size(); ++i) state_.led[i] = i < frame.led.size() ? frame.led[i] : Rgb{};
    state_.t_ms = frame.t_ms;
    return state_;
}

perception::ImuSample Device::sample_imu(std::int64_t t_ms) {
    perception::ImuSample s;
    s.t_ms = static_cast<double>(t_ms);
    if (cfg_.imu_noise_g > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg_.imu_noise_g);
        for (auto& a : s.accel_g) a += noise(rng_);
    }
    return s;
}

SensorReplay::SensorReplay(perception::SensorTrace trace, perception::GestureConfig cfg, std::int64_t offset_ms)
    : trace_(std::move(trace)), detector_(cfg), offset_ms_(offset_ms) {
    std::stable_sort(trace_.touch.begin(), trace_.touch.end(),
                     [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
}

std::vector<perception::GestureEvent> SensorReplay::advance_to(std::int64_t t_ms) {
    std::vector<perception::GestureEvent> out;
    const double local = static_cast<double>(t_ms - offset_ms_);
    while (next_imu_ < trace_.imu.size() && trace_.imu[next_imu_].t_ms <= local) {
        for (auto e : detector_.push(trace_.imu[next_imu_])) {
            e.t_ms += static_cast<double>(offset_ms_);
            out.push_back(e);
        }
        ++next_imu_;
    }
    while (next_touch_ < trace_.touch.size() && trace_.touch[next_touch_].t_ms <= local) {
        const auto& touch = trace_.touch[next_touch_++];
        out.push_back({touch.down ? perception::GestureKind::TouchStart : perception::GestureKind::TouchEnd,
                       touch.t_ms + static_cast<double>(offset_ms_), touch.zone});
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t_ms < b.t_ms; });
    return out;
}

bool SensorReplay::done() const { return next_imu_ >= trace_.imu.size() && next_touch_ >= trace_.touch.size(); }

void deliver(engine::Engine& engine, const std::vector<perception::GestureEvent>& events, const std::string& source) {
    for (const auto& e : events) engine.inject(e.kind, source, e.zone);
}

}  // namespace lantern::devicesim
