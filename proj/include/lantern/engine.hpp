#pragma once

#include "lantern/behaviors.hpp"
#include "lantern/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lantern::engine {

using behaviors::BehaviorDef;
using perception::GestureKind;

/// One setpoint for every output channel. t_ms is always a multiple of tick_ms.
struct ActuatorFrame {
    std::int64_t t_ms = 0;
    double servo_compression = 0.0;
    double vibration_amplitude = 0.0;
    std::vector<Rgb> led;
    std::optional<std::string> active_behavior;
    std::string phase;

    friend bool operator==(const ActuatorFrame&, const ActuatorFrame&) = default;
};

struct Event {
    GestureKind kind = GestureKind::Tilt;
    std::int64_t arrival_ms = 0;
    std::string source = "local";
    std::uint64_t seq = 0;
    std::optional<int> zone;
};

enum class Status { ack, busy, not_found, invalid };

std::string to_string(Status s);

struct Reply {
    Status status = Status::ack;
    std::string message;

    bool ok() const { return status == Status::ack; }
};

struct EngineConfig {
    int tick_ms = 10;
    int pixel_count = 60;
    double ramp_s = 0.5;  ///< ramp-in, ramp-down and preemption hand-over
};

struct BehaviorStatus {
    std::string id;
    ChannelSet channels;
    Params params;
    bool active = false;
    bool stopping = false;
    bool pending = false;
    std::string phase;
};

/// Things worth telling remote observers about.
struct Notice {
    enum class Kind { started, phase, finished, released, gesture, warning };
    Kind kind = Kind::phase;
    std::int64_t t_ms = 0;
    std::string behavior;
    std::string detail;
};

std::string to_string(Notice::Kind k);

/// Fixed-step scheduler. Owns the simulated clock and the behavior registry,
/// and hands each channel to at most one behavior at a time.
///
/// Not thread-safe: one owner drives every call (see service::EngineLoop for
/// the threaded front end).
class Engine {
public:
    explicit Engine(EngineConfig cfg = {}, std::vector<BehaviorDef> defs = behaviors::builtin_definitions());
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    /// Throws ConfigError on a duplicate id or an empty channel claim.
    void register_behavior(BehaviorDef def);

    /// Starts a behavior on its channels. Busy if any is taken and !preempt;
    /// with preempt the incumbents ramp down first and the start is deferred.
    Reply start(const std::string& id, const Params& params = {}, bool preempt = false);
    Reply stop(const std::string& id);
    /// Updates registry defaults now and the running instance at the next tick.
    Reply set_param(const std::string& id, const std::string& key, double value);
    std::vector<BehaviorStatus> list() const;

    /// Enqueues an event stamped with the current clock; handled on the next tick.
    void inject(GestureKind kind, const std::string& source = "local", std::optional<int> zone = std::nullopt);

    ActuatorFrame tick();

    std::int64_t clock_ms() const { return clock_ms_; }
    const EngineConfig& config() const { return cfg_; }
    const ActuatorFrame& last_frame() const { return last_frame_; }

    /// True when nothing is running, ramping down or waiting to start.
    bool idle() const;
    std::optional<std::string> owner(Channel c) const;
    /// How many behaviors wrote the servo channel during the last tick.
    int servo_writers_last_tick() const { return servo_writers_; }

    std::vector<Notice> take_notices();

private:
    struct Slot;
    struct Pending;

    bool channels_busy(ChannelSet channels, const std::string* except_pending = nullptr) const;
    void begin_stop(Slot& slot, std::int64_t at_ms);
    void notice(Notice::Kind kind, std::string behavior, std::string detail, std::int64_t t_ms);

    EngineConfig cfg_;
    std::map<std::string, BehaviorDef> registry_;
    std::vector<Slot> slots_;
    std::vector<Pending> pending_;
    std::vector<Event> events_;
    std::map<std::string, std::uint64_t> source_seq_;
    std::vector<std::tuple<std::string, std::string, double>> param_updates_;
    std::int64_t clock_ms_ = 0;
    ActuatorFrame last_frame_;
    int servo_writers_ = 0;
    std::vector<Notice> notices_;
};

}  // namespace lantern::engine
