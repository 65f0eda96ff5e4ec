#include "lantern/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lantern::profiles {

namespace {

double ease(double u, Easing easing) {
    u = std::clamp(u, 0.0, 1.0);
    if (easing == Easing::linear) return u;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

double positive_fmod(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0.0) r += period;
    return r;
}

}  // namespace

void BreathPattern::validate() const {
    if (inhale_s < 0 || hold_in_s < 0 || exhale_s < 0 || hold_out_s < 0)
        throw ConfigError("breath pattern phase durations must be non-negative");
    if (!(inhale_s > 0.0 && exhale_s > 0.0)) throw ConfigError("breath inhale and exhale must be > 0");
    if (!(amplitude > 0.0 && amplitude <= 1.0)) throw ConfigError("breath amplitude must be in (0, 1]");
}

namespace patterns {
BreathPattern slow() { return {4.0, 0.0, 6.0, 0.0, 0.8, Easing::sinusoidal}; }
BreathPattern bunny() { return {0.4, 0.0, 0.4, 0.0, 0.3, Easing::sinusoidal}; }
BreathPattern dragon() { return {5.0, 2.0, 7.0, 0.0, 1.0, Easing::sinusoidal}; }
BreathPattern normal() { return {2.0, 0.0, 2.0, 0.0, 0.5, Easing::sinusoidal}; }
}  // namespace patterns

double breath_value(double t_s, const BreathPattern& p) {
    const double period = p.period();
    if (!(period > 0.0)) throw ConfigError("breath pattern period must be > 0");
    double tau = positive_fmod(t_s, period);

    if (tau < p.inhale_s) return p.amplitude * ease(tau / p.inhale_s, p.easing);
    tau -= p.inhale_s;
    if (tau < p.hold_in_s) return p.amplitude;
    tau -= p.hold_in_s;
    if (tau < p.exhale_s) return p.amplitude * (1.0 - ease(tau / p.exhale_s, p.easing));
    return 0.0;
}

double breath_at_phase(double cycles, const BreathPattern& p) {
    const double frac = cycles - std::floor(cycles);
    return breath_value(frac * p.period(), p);
}

void PulseEnvelope::validate() const {
    if (!(period_s > 0.0)) throw ConfigError("pulse envelope period must be > 0");
    double cursor = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.offset_s < 0 || e.duration_s <= 0 || e.amplitude < 0 || e.amplitude > 1)
            throw ConfigError("pulse " + std::to_string(i) + " has invalid offset, duration or amplitude");
        if (i > 0 && e.offset_s < cursor)
            throw ConfigError("pulse " + std::to_string(i) + " overlaps or precedes the previous pulse");
        cursor = e.offset_s + e.duration_s;
        if (cursor > period_s) throw ConfigError("pulse " + std::to_string(i) + " extends past the period");
    }
}

PulseEnvelope PulseEnvelope::lub_dub(double bpm) {
    if (!(bpm > 0.0)) throw ConfigError("heartbeat bpm must be > 0");
    PulseEnvelope env;
    env.events = {{0.0, 1.0, 0.08}, {0.15, 0.7, 0.06}};
    env.period_s = 60.0 / bpm;
    env.validate();
    return env;
}

PulseEnvelope PulseEnvelope::single(double period_s, double amplitude, double duration_s) {
    PulseEnvelope env;
    env.events = {{0.0, amplitude, duration_s}};
    env.period_s = period_s;
    env.validate();
    return env;
}

double pulse_value(double t_s, const PulseEnvelope& env) {
    if (!(env.period_s > 0.0)) throw ConfigError("pulse envelope period must be > 0");
    const double tau = positive_fmod(t_s, env.period_s);
    for (const auto& e : env.events) {
        if (tau < e.offset_s) break;
        if (tau < e.offset_s + e.duration_s) return e.amplitude;
    }
    return 0.0;
}

void PurrSpec::validate() const {
    if (!(carrier_hz > 0.0)) throw ConfigError("purr carrier_hz must be > 0");
    if (!(burst_period_s > 0.0)) throw ConfigError("purr burst_period_s must be > 0");
    if (!(burst_duty > 0.0 && burst_duty <= 1.0)) throw ConfigError("purr burst_duty must be in (0, 1]");
    if (!(fade_fraction >= 0.0 && fade_fraction <= 0.5)) throw ConfigError("purr fade_fraction must be in [0, 0.5]");
    if (!(carrier_hz * burst_period_s > 10.0)) throw ConfigError("purr carrier must be much faster than the burst period");
}

double purr_gate(double t_s, const PurrSpec& spec) {
    const double tau = positive_fmod(t_s, spec.burst_period_s);
    const double on = spec.burst_length_s();
    if (tau >= on) return 0.0;
    const double fade = spec.fade_fraction * on;
    if (fade <= 0.0) return 1.0;
    if (tau < fade) return tau / fade;
    if (tau > on - fade) return (on - tau) / fade;
    return 1.0;
}

double purr_value(double t_s, const PurrSpec& spec) {
    // Raised sine keeps the fundamental at the carrier frequency.
    const double carrier = 0.5 * (1.0 + std::sin(2.0 * std::numbers::pi * spec.carrier_hz * t_s));
    return std::clamp(carrier * purr_gate(t_s, spec), 0.0, 1.0);
}

void ColorRamp::validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("color ramp duration_s must be > 0");
}

Rgb ramp_color(double u, const ColorRamp& ramp) {
    u = std::clamp(u, 0.0, 1.0);
    auto lerp = [u](std::uint8_t a, std::uint8_t b) {
        const double v = a + (static_cast<double>(b) - a) * u;
        return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    };
    return {lerp(ramp.start.r, ramp.end.r), lerp(ramp.start.g, ramp.end.g), lerp(ramp.start.b, ramp.end.b)};
}

}  // namespace lantern::profiles
