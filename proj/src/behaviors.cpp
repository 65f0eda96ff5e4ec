#include "lantern/behaviors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace lantern::behaviors {

namespace {

using profiles::BreathPattern;

/// Overlays `given` on `defaults`, rejecting keys the behavior does not know.
Params merge_params(const std::string& id, Params defaults, const Params& given,
                    std::initializer_list<const char*> extra_keys = {}) {
    for (const auto& [key, value] : given) {
        const bool known = defaults.contains(key) ||
                           std::any_of(extra_keys.begin(), extra_keys.end(), [&](const char* k) { return key == k; });
        if (!known) throw ConfigError("behavior '" + id + "' has no parameter '" + key + "'");
        defaults[key] = value;
    }
    return defaults;
}

BreathPattern pattern_from(const Params& p, const BreathPattern& fallback) {
    BreathPattern b = fallback;
    b.inhale_s = param_or(p, "inhale_s", b.inhale_s);
    b.hold_in_s = param_or(p, "hold_in_s", b.hold_in_s);
    b.exhale_s = param_or(p, "exhale_s", b.exhale_s);
    b.hold_out_s = param_or(p, "hold_out_s", b.hold_out_s);
    b.amplitude = param_or(p, "amplitude", b.amplitude);
    return b;
}

Params breath_defaults(const BreathPattern& b) {
    return {{"inhale_s", b.inhale_s},
            {"hold_in_s", b.hold_in_s},
            {"exhale_s", b.exhale_s},
            {"hold_out_s", b.hold_out_s},
            {"amplitude", b.amplitude}};
}

BreathPattern base_pattern(BreathKind kind) {
    switch (kind) {
        case BreathKind::slow: return profiles::patterns::slow();
        case BreathKind::bunny: return profiles::patterns::bunny();
        case BreathKind::dragon: return profiles::patterns::dragon();
    }
    return profiles::patterns::slow();
}

std::string breath_id(BreathKind kind) {
    switch (kind) {
        case BreathKind::slow: return "slow";
        case BreathKind::bunny: return "bunny";
        case BreathKind::dragon: return "dragon";
    }
    return "slow";
}

Params heartbeat_defaults() { return {{"bpm", 60.0}, {"amplitude", 1.0}}; }

Params postop_defaults() {
    const auto n = profiles::patterns::normal();
    return {{"reps", 3.0},
            {"normal_inhale_s", n.inhale_s},
            {"normal_exhale_s", n.exhale_s},
            {"normal_amplitude", n.amplitude},
            {"deep_inhale_s", 4.0},
            {"deep_exhale_s", 6.0},
            {"deep_amplitude", 1.0}};
}

Params soft_toy_defaults() {
    Params p = breath_defaults(profiles::patterns::slow());
    const profiles::PurrSpec purr;
    p["carrier_hz"] = purr.carrier_hz;
    p["burst_period_s"] = purr.burst_period_s;
    p["burst_duty"] = purr.burst_duty;
    p["fade_fraction"] = purr.fade_fraction;
    p["purr_gain"] = 0.5;
    return p;
}

Params circadian_defaults() {
    return {{"ramp_s", 1800.0},          {"start_bpm", 6.0},           {"end_bpm", 12.0},
            {"breath_amplitude", 0.6},   {"heartbeat_period_s", 5.0},  {"heartbeat_amplitude", 0.5},
            {"heartbeat_pulse_s", 0.15}, {"dismiss_s", 2.0}};
}

Params speaker_defaults() {
    return {{"fallback_cycle_s", 4.0}, {"loudness_floor", 0.2}, {"max_range", 1.0},
            {"rms_window_s", 0.5},     {"pulse_s", 0.08},       {"pulse_level", 0.8}};
}

profiles::PurrSpec purr_from(const Params& p) {
    profiles::PurrSpec s;
    s.carrier_hz = param_or(p, "carrier_hz", s.carrier_hz);
    s.burst_period_s = param_or(p, "burst_period_s", s.burst_period_s);
    s.burst_duty = param_or(p, "burst_duty", s.burst_duty);
    s.fade_fraction = param_or(p, "fade_fraction", s.fade_fraction);
    return s;
}

double unit_interval(const Params& p, const std::string& id, const std::string& key) {
    const double v = p.at(key);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("behavior '" + id + "' parameter '" + key + "' must be in [0, 1]");
    return v;
}

Rgb scale(Rgb c, double k) {
    auto s = [k](std::uint8_t v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v * k + 0.5), 0.0, 255.0)); };
    return {s(c.r), s(c.g), s(c.b)};
}

}  // namespace

BehaviorSpec named_breathing(BreathKind kind, const Params& params) {
    const auto id = breath_id(kind);
    const auto base = base_pattern(kind);
    BehaviorSpec spec;
    spec.id = id;
    spec.channels = {Channel::servo};
    spec.params = merge_params(id, breath_defaults(base), params);
    pattern_from(spec.params, base).validate();
    spec.phases = {Phase{"BREATHE", std::nullopt, {}, {}}};
    spec.generate = [base](const PhaseClock& clock, const Params& p) {
        Sample s;
        s.servo = profiles::breath_value(clock.t_s, pattern_from(p, base));
        return s;
    };
    return spec;
}

BehaviorSpec heartbeat(const Params& params) {
    BehaviorSpec spec;
    spec.id = "heartbeat";
    spec.channels = {Channel::vibration};
    spec.params = merge_params(spec.id, heartbeat_defaults(), params);
    profiles::PulseEnvelope::lub_dub(spec.params.at("bpm"));
    unit_interval(spec.params, spec.id, "amplitude");
    spec.phases = {Phase{"BEAT", std::nullopt, {}, {}}};
    spec.generate = [](const PhaseClock& clock, const Params& p) {
        const auto env = profiles::PulseEnvelope::lub_dub(p.at("bpm"));
        Sample s;
        s.vibration = p.at("amplitude") * profiles::pulse_value(clock.t_s, env);
        return s;
    };
    return spec;
}

BehaviorSpec postop_breathing(const Params& params) {
    BehaviorSpec spec;
    spec.id = "postop";
    spec.channels = {Channel::servo};
    spec.params = merge_params(spec.id, postop_defaults(), params);
    auto& p = spec.params;

    const double reps_value = p.at("reps");
    if (!(reps_value >= 1.0) || reps_value != std::floor(reps_value))
        throw ConfigError("behavior 'postop' parameter 'reps' must be a positive integer");
    const double deep = p.at("deep_inhale_s");
    const double clamped = std::clamp(deep, 3.0, 5.0);
    if (clamped != deep) {
        spec.warnings.push_back("postop deep_inhale_s " + std::to_string(deep) + " clamped to " +
                                std::to_string(clamped));
        p["deep_inhale_s"] = clamped;
    }

    const BreathPattern normal{p.at("normal_inhale_s"), 0.0, p.at("normal_exhale_s"), 0.0, p.at("normal_amplitude"),
                               profiles::Easing::sinusoidal};
    const BreathPattern deep_breath{p.at("deep_inhale_s"), 0.0, p.at("deep_exhale_s"), 0.0, p.at("deep_amplitude"),
                                    profiles::Easing::sinusoidal};
    normal.validate();
    deep_breath.validate();

    // One repetition: three normal breaths, then one deep breath.
    const int reps = static_cast<int>(reps_value);
    auto deep_flags = std::make_shared<std::vector<bool>>();
    for (int r = 1; r <= reps; ++r) {
        for (int i = 1; i <= 3; ++i) {
            spec.phases.push_back({"rep" + std::to_string(r) + "/normal" + std::to_string(i), normal.period(), {}, {}});
            deep_flags->push_back(false);
        }
        spec.phases.push_back({"rep" + std::to_string(r) + "/deep", deep_breath.period(), {}, {}});
        deep_flags->push_back(true);
    }
    for (std::size_t i = 0; i + 1 < spec.phases.size(); ++i) spec.phases[i].next = spec.phases[i + 1].name;
    spec.derived["repetition_s"] = 3.0 * normal.period() + deep_breath.period();
    spec.derived["total_s"] = reps * spec.derived["repetition_s"];

    spec.generate = [deep_flags](const PhaseClock& clock, const Params& p) {
        const bool is_deep = (*deep_flags)[clock.phase_index];
        const BreathPattern b =
            is_deep ? BreathPattern{p.at("deep_inhale_s"), 0.0, p.at("deep_exhale_s"), 0.0, p.at("deep_amplitude"),
                                    profiles::Easing::sinusoidal}
                    : BreathPattern{p.at("normal_inhale_s"), 0.0, p.at("normal_exhale_s"), 0.0,
                                    p.at("normal_amplitude"), profiles::Easing::sinusoidal};
        Sample s;
        s.servo = profiles::breath_value(std::min(clock.t_phase_s, b.period() - 1e-12), b);
        return s;
    };
    return spec;
}

BehaviorSpec soft_toy_purr(const Params& params) {
    BehaviorSpec spec;
    spec.id = "softtoy";
    spec.channels = {Channel::servo, Channel::vibration};
    spec.params = merge_params(spec.id, soft_toy_defaults(), params);
    pattern_from(spec.params, profiles::patterns::slow()).validate();
    purr_from(spec.params).validate();
    unit_interval(spec.params, spec.id, "purr_gain");
    spec.phases = {Phase{"PURR", std::nullopt, {}, {}}};
    spec.generate = [](const PhaseClock& clock, const Params& p) {
        Sample s;
        s.servo = profiles::breath_value(clock.t_s, pattern_from(p, profiles::patterns::slow()));
        s.vibration = p.at("purr_gain") * profiles::purr_value(clock.t_s, purr_from(p));
        return s;
    };
    return spec;
}

BehaviorSpec circadian_lamp(const Params& params) {
    BehaviorSpec spec;
    spec.id = "circadian";
    spec.channels = {Channel::servo, Channel::vibration, Channel::led};
    spec.params = merge_params(spec.id, circadian_defaults(), params, {"alarm_s"});
    auto& p = spec.params;
    if (!p.contains("alarm_s")) throw ConfigError("behavior 'circadian' requires parameter 'alarm_s'");
    if (!(p.at("alarm_s") > 0.0)) throw ConfigError("behavior 'circadian' parameter 'alarm_s' must be > 0");
    if (!(p.at("ramp_s") > 0.0)) throw ConfigError("behavior 'circadian' parameter 'ramp_s' must be > 0");
    if (!(p.at("start_bpm") > 0.0) || !(p.at("end_bpm") > 0.0))
        throw ConfigError("behavior 'circadian' breathing tempo must be > 0");
    if (!(p.at("dismiss_s") > 0.0)) throw ConfigError("behavior 'circadian' parameter 'dismiss_s' must be > 0");
    unit_interval(p, spec.id, "breath_amplitude");
    profiles::PulseEnvelope::single(p.at("heartbeat_period_s"), unit_interval(p, spec.id, "heartbeat_amplitude"),
                                    p.at("heartbeat_pulse_s"));

    const std::vector<EventExit> dismiss{{GestureKind::TwoTilts, "DISMISSED"}, {GestureKind::Flip, "DISMISSED"}};
    spec.phases = {
        Phase{"DAWN", p.at("alarm_s"), "ALARM", dismiss},
        Phase{"ALARM", std::nullopt, {}, dismiss},
        Phase{"DISMISSED", p.at("dismiss_s"), {}, {}},
    };

    spec.generate = [](const PhaseClock& clock, const Params& p) {
        const double alarm = p.at("alarm_s");
        const double ramp = std::min(p.at("ramp_s"), alarm);
        const double ramp_start = alarm - ramp;
        const double b0 = p.at("start_bpm") / 60.0;
        const double b1 = p.at("end_bpm") / 60.0;

        // Breath cycles elapsed under a tempo that rises linearly across the ramp.
        auto cycles_at = [&](double t) {
            if (t <= ramp_start) return b0 * t;
            const double tau = std::min(t, alarm) - ramp_start;
            double c = b0 * ramp_start + b0 * tau + (b1 - b0) * tau * tau / (2.0 * ramp);
            if (t > alarm) c += b1 * (t - alarm);
            return c;
        };

        auto breath = profiles::patterns::slow();
        breath.amplitude = p.at("breath_amplitude");
        const profiles::ColorRamp colors{ramp, {139, 0, 0}, {255, 214, 70}};

        Sample s;
        if (clock.phase == "DAWN") {
            s.led = profiles::ramp_color((clock.t_s - ramp_start) / ramp, colors);
            s.servo = profiles::breath_at_phase(cycles_at(clock.t_s), breath);
            s.vibration = 0.0;
        } else if (clock.phase == "ALARM") {
            s.led = colors.end;
            s.servo = profiles::breath_at_phase(cycles_at(alarm + clock.t_phase_s), breath);
            const auto beat = profiles::PulseEnvelope::single(p.at("heartbeat_period_s"), p.at("heartbeat_amplitude"),
                                                              p.at("heartbeat_pulse_s"));
            s.vibration = profiles::pulse_value(clock.t_phase_s, beat);
        } else {
            const double keep = 1.0 - std::clamp(clock.t_phase_s / p.at("dismiss_s"), 0.0, 1.0);
            s.servo = clock.entry.servo.value_or(0.0) * keep;
            s.vibration = clock.entry.vibration.value_or(0.0) * keep;
            s.led = scale(clock.entry.led.value_or(Rgb{}), keep);
        }
        return s;
    };
    return spec;
}

namespace {

struct SpeakerPlan {
    double cycle_s = 4.0;
    double anchor_s = 0.0;
    std::vector<double> loudness;  ///< normalized windowed RMS
    double window_s = 0.5;
    std::vector<double> bass_onsets_s;
};

}  // namespace

BehaviorSpec beat_synced_speaker(const Params& params, std::span<const float> pcm, double rate_hz) {
    BehaviorSpec spec;
    spec.id = "speaker";
    spec.channels = {Channel::servo, Channel::vibration};
    spec.params = merge_params(spec.id, speaker_defaults(), params);
    auto& p = spec.params;
    if (pcm.empty()) throw ConfigError("behavior 'speaker' needs a non-empty audio track");
    if (!(p.at("fallback_cycle_s") > 0.0) || !(p.at("rms_window_s") > 0.0) || !(p.at("pulse_s") > 0.0))
        throw ConfigError("behavior 'speaker' durations must be > 0");
    unit_interval(p, spec.id, "loudness_floor");
    unit_interval(p, spec.id, "max_range");
    unit_interval(p, spec.id, "pulse_level");

    auto plan = std::make_shared<SpeakerPlan>();
    const auto analysis = perception::detect_onsets(pcm, rate_hz);
    const auto full = analysis.band(perception::Band::full);
    if (analysis.tempo_bpm) {
        plan->cycle_s = 60.0 / *analysis.tempo_bpm;
        // Peak expansion lands on the first detected beat.
        plan->anchor_s = full.front().t_ms / 1000.0 - plan->cycle_s / 2.0;
        spec.derived["tempo_bpm"] = *analysis.tempo_bpm;
    } else {
        plan->cycle_s = p.at("fallback_cycle_s");
        spec.warnings.push_back("speaker: no tempo detected, using fallback cycle of " +
                                std::to_string(plan->cycle_s) + " s");
        spec.derived["no_tempo"] = 1.0;
    }
    for (const auto& e : analysis.band(perception::Band::bass)) plan->bass_onsets_s.push_back(e.t_ms / 1000.0);

    plan->window_s = p.at("rms_window_s");
    const auto window = static_cast<std::size_t>(std::max(1.0, std::round(plan->window_s * rate_hz)));
    double loudest = 0.0;
    for (std::size_t begin = 0; begin < pcm.size(); begin += window) {
        const std::size_t end = std::min(pcm.size(), begin + window);
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += double(pcm[i]) * pcm[i];
        plan->loudness.push_back(std::sqrt(sum / double(end - begin)));
        loudest = std::max(loudest, plan->loudness.back());
    }
    for (auto& v : plan->loudness) v = loudest > 0.0 ? v / loudest : 0.0;

    const double duration_s = double(pcm.size()) / rate_hz;
    spec.derived["cycle_s"] = plan->cycle_s;
    spec.derived["duration_s"] = duration_s;
    spec.derived["bass_onsets"] = double(plan->bass_onsets_s.size());
    spec.phases = {Phase{"PLAY", duration_s, {}, {}}};

    spec.generate = [plan](const PhaseClock& clock, const Params& p) {
        const double t = clock.t_s;
        const auto idx = std::min(plan->loudness.size() - 1, static_cast<std::size_t>(std::max(0.0, t / plan->window_s)));
        const double range = p.at("max_range") * std::max(p.at("loudness_floor"), plan->loudness[idx]);
        const double cycles = (t - plan->anchor_s) / plan->cycle_s;

        Sample s;
        s.servo = range * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * cycles));
        s.vibration = 0.0;
        auto it = std::upper_bound(plan->bass_onsets_s.begin(), plan->bass_onsets_s.end(), t);
        if (it != plan->bass_onsets_s.begin() && t - *std::prev(it) < p.at("pulse_s")) s.vibration = p.at("pulse_level");
        return s;
    };
    return spec;
}

std::vector<BehaviorDef> builtin_definitions(std::optional<AudioClip> audio) {
    std::vector<BehaviorDef> defs;
    for (auto kind : {BreathKind::slow, BreathKind::bunny, BreathKind::dragon}) {
        defs.push_back({breath_id(kind), {Channel::servo}, breath_defaults(base_pattern(kind)),
                        [kind](const Params& p) { return named_breathing(kind, p); }});
    }
    defs.push_back({"heartbeat", {Channel::vibration}, heartbeat_defaults(), heartbeat});
    defs.push_back({"postop", {Channel::servo}, postop_defaults(), postop_breathing});
    defs.push_back({"softtoy", {Channel::servo, Channel::vibration}, soft_toy_defaults(), soft_toy_purr});

    Params lamp = circadian_defaults();
    lamp["alarm_s"] = 1800.0;
    defs.push_back({"circadian", {Channel::servo, Channel::vibration, Channel::led}, lamp, circadian_lamp});

    auto clip = std::make_shared<std::optional<AudioClip>>(std::move(audio));
    defs.push_back({"speaker", {Channel::servo, Channel::vibration}, speaker_defaults(), [clip](const Params& p) {
                        if (!clip->has_value()) throw ConfigError("behavior 'speaker' needs an audio track (--audio)");
                        return beat_synced_speaker(p, (*clip)->samples, (*clip)->rate_hz);
                    }});
    return defs;
}

}  // namespace lantern::behaviors
