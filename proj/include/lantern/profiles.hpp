#pragma once

#include "lantern/types.hpp"

#include <string>
#include <vector>

// Time-parameterized setpoint generators. All functions are pure.

namespace lantern::profiles {

enum class Easing { sinusoidal, linear };

struct BreathPattern {
    double inhale_s = 4.0;
    double hold_in_s = 0.0;
    double exhale_s = 6.0;
    double hold_out_s = 0.0;
    double amplitude = 0.8;
    Easing easing = Easing::sinusoidal;

    double period() const { return inhale_s + hold_in_s + exhale_s + hold_out_s; }
    void validate() const;
};

namespace patterns {
BreathPattern slow();    ///< 4 s in / 6 s out, about six breaths a minute
BreathPattern bunny();   ///< short, quick breaths
BreathPattern dragon();  ///< slow, deep inhale, hold, long exhale
BreathPattern normal();  ///< resting breath used between deep breaths
}  // namespace patterns

/// Compression in [0, amplitude] at time t.
double breath_value(double t_s, const BreathPattern& p);

/// Same waveform addressed by cycle phase (fractional part of `cycles`).
double breath_at_phase(double cycles, const BreathPattern& p);

struct Pulse {
    double offset_s = 0.0;
    double amplitude = 1.0;
    double duration_s = 0.1;
};

struct PulseEnvelope {
    std::vector<Pulse> events;
    double period_s = 1.0;

    void validate() const;

    /// Two-pulse heartbeat; `bpm` scales the period, pulse shapes stay fixed.
    static PulseEnvelope lub_dub(double bpm = 60.0);
    /// One soft pulse per period.
    static PulseEnvelope single(double period_s, double amplitude, double duration_s);
};

double pulse_value(double t_s, const PulseEnvelope& env);

struct PurrSpec {
    double carrier_hz = 20.0;
    double burst_period_s = 10.0;
    double burst_duty = 0.5;
    double fade_fraction = 0.25;

    void validate() const;
    double burst_length_s() const { return burst_duty * burst_period_s; }
};

/// Burst gate alone: trapezoid with linear fades, zero between bursts.
double purr_gate(double t_s, const PurrSpec& spec);

/// Carrier modulated by the burst gate, in [0, 1].
double purr_value(double t_s, const PurrSpec& spec);

struct ColorRamp {
    double duration_s = 1800.0;
    Rgb start{139, 0, 0};
    Rgb end{255, 214, 70};

    void validate() const;
};

/// Linear 8-bit interpolation, rounded half-up. u is clamped to [0, 1].
Rgb ramp_color(double u, const ColorRamp& ramp);

}  // namespace lantern::profiles
