#pragma once

#include "lantern/engine.hpp"
#include "lantern/kinematics.hpp"
#include "lantern/perception.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace lantern::devicesim {

struct DeviceConfig {
    kinematics::ShellConfig shell;
    double max_speed_rad_s = 7.0;
    int pixel_count = 60;
    double supply_v = 7.5;
    std::uint64_t rng_seed = 1;
    double imu_noise_g = 0.0;  ///< std-dev of synthetic resting IMU noise
    int tick_ms = 10;

    void validate() const;
};

/// Position-tracking servo limited to max_speed_rad_s.
struct ServoModel {
    double max_speed_rad_s = 7.0;
    double max_angle_rad = 0.0;
    double position_rad = 0.0;
};

struct DeviceState {
    std::int64_t t_ms = 0;
    ServoModel servo;
    double vibration_amplitude = 0.0;
    std::vector<Rgb> led;
    kinematics::ShellGeometry geometry;
    double supply_v = 7.5;
    std::uint64_t rng_seed = 1;
    double servo_travel_rad = 0.0;  ///< accumulated |Δangle|, for wear / power bookkeeping

    double compression() const { return geometry.compression; }
    friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

/// Simulated Lantern hardware driven by actuator frames.
class Device {
public:
    explicit Device(DeviceConfig cfg = {});

    const DeviceState& apply(const engine::ActuatorFrame& frame);
    DeviceState snapshot() const { return state_; }
    const DeviceConfig& config() const { return cfg_; }

    /// Resting accelerometer reading with seeded Gaussian noise.
    perception::ImuSample sample_imu(std::int64_t t_ms);

private:
    DeviceConfig cfg_;
    DeviceState state_;
    std::mt19937_64 rng_;
};

/// Feeds a scripted sensor trace through gesture recognition on the
/// simulated clock. Trace time zero maps to `offset_ms`.
class SensorReplay {
public:
    explicit SensorReplay(perception::SensorTrace trace, perception::GestureConfig cfg = {}, std::int64_t offset_ms = 0);

    /// Gestures (and touch edges) whose evidence is at or before t_ms.
    std::vector<perception::GestureEvent> advance_to(std::int64_t t_ms);
    bool done() const;

private:
    perception::SensorTrace trace_;
    perception::GestureDetector detector_;
    std::int64_t offset_ms_;
    std::size_t next_imu_ = 0;
    std::size_t next_touch_ = 0;
};

/// Delivers replayed gestures into the engine's event queue.
void deliver(engine::Engine& engine, const std::vector<perception::GestureEvent>& events,
             const std::string& source = "imu");

}  // namespace lantern::devicesim
