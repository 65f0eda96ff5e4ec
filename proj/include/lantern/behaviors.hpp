#pragma once

#include "lantern/perception.hpp"
#include "lantern/profiles.hpp"
#include "lantern/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lantern::behaviors {

using perception::GestureKind;

/// Setpoints a behavior produces for the channels it drives.
struct Sample {
    std::optional<double> servo;
    std::optional<double> vibration;
    std::optional<Rgb> led;
};

/// What a generator sees when it is sampled.
struct PhaseClock {
    std::size_t phase_index = 0;
    std::string_view phase;
    double t_phase_s = 0.0;  ///< time since the current phase was entered
    double t_s = 0.0;        ///< time since the behavior started
    const Sample& entry;     ///< last output before the current phase was entered
};

using Generator = std::function<Sample(const PhaseClock&, const Params&)>;

struct EventExit {
    GestureKind on;
    std::string target;
};

struct Phase {
    std::string name;
    std::optional<double> duration_s;  ///< time-based exit
    std::string next;                  ///< target after duration_s; empty finishes the behavior
    std::vector<EventExit> on_events;
};

struct BehaviorSpec {
    std::string id;
    ChannelSet channels;
    Params params;                      ///< live-tunable inputs
    Params derived;                     ///< values computed at build time (cycle length, tempo, ...)
    std::vector<Phase> phases;          ///< phases.front() is the start phase
    Generator generate;
    std::vector<std::string> warnings;  ///< surfaced as telemetry warnings when started

    /// Throws ConfigError: empty id or channels, dangling targets, unreachable phases.
    void validate() const;
    std::optional<std::size_t> phase_index(std::string_view name) const;
};

struct PhaseMarker {
    double t_s = 0.0;
    std::string from;
    std::string to;  ///< empty when the behavior finished
};

/// Runtime state of one behavior: current phase and its entry time.
class BehaviorInstance {
public:
    explicit BehaviorInstance(BehaviorSpec spec);

    /// Applies an event at behavior time t_s. Returns true if the phase changed.
    bool handle(GestureKind kind, double t_s);

    /// Runs any due time-based transitions, then samples. Empty once finished.
    Sample step(double t_s);

    bool finished() const { return finished_; }
    std::string_view phase() const;
    const BehaviorSpec& spec() const { return spec_; }
    Params& params() { return spec_.params; }
    const Sample& last_sample() const { return last_; }

    /// Transitions since the previous call.
    std::vector<PhaseMarker> take_markers();

private:
    void enter(std::optional<std::size_t> target, double t_s);

    BehaviorSpec spec_;
    std::size_t current_ = 0;
    double phase_start_s_ = 0.0;
    bool finished_ = false;
    Sample last_;
    Sample entry_;
    std::vector<PhaseMarker> markers_;
};

struct TraceFrame {
    std::int64_t t_ms = 0;
    double servo = 0.0;
    double vibration = 0.0;
    Rgb led;
    std::string phase;
};

struct ScheduledEvent {
    double t_s = 0.0;
    GestureKind kind = GestureKind::Tilt;
};

/// Frames of one behavior run in isolation, plus its phase transitions.
struct BehaviorTrace {
    std::vector<TraceFrame> frames;
    std::vector<PhaseMarker> markers;
};

/// Samples `spec` every tick from t = 0 until `duration_s` or until it finishes.
BehaviorTrace render(const BehaviorSpec& spec, double duration_s, int tick_ms = 10,
                     std::span<const ScheduledEvent> events = {});

// Built-in behaviors ----------------------------------------------------------

enum class BreathKind { slow, bunny, dragon };

BehaviorSpec named_breathing(BreathKind kind, const Params& params);
BehaviorSpec heartbeat(const Params& params);
BehaviorSpec postop_breathing(const Params& params);
BehaviorSpec soft_toy_purr(const Params& params);
/// Requires `alarm_s`, the offset of the alarm from behavior start.
BehaviorSpec circadian_lamp(const Params& params);
BehaviorSpec beat_synced_speaker(const Params& params, std::span<const float> pcm, double rate_hz);

using Factory = std::function<BehaviorSpec(const Params&)>;

/// Registry entry: what can be started, with which defaults.
struct BehaviorDef {
    std::string id;
    ChannelSet channels;
    Params defaults;
    Factory make;
};

struct AudioClip {
    std::vector<float> samples;
    double rate_hz = 44100.0;
};

/// Every built-in behavior. The speaker entry uses `audio` and fails to start without it.
std::vector<BehaviorDef> builtin_definitions(std::optional<AudioClip> audio = std::nullopt);

}  // namespace lantern::behaviors
