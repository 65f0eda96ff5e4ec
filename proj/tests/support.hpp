#pragma once
// Synthetic inputs shared by the unit tests and the acceptance runner.
// Every generator is deterministic; ground truth comes from construction.

#include "lantern/behaviors.hpp"
#include "lantern/perception.hpp"
#include "lantern/telemetry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace lantern::testing {

inline constexpr double kPi = std::numbers::pi;

/// Accelerometer reading for a device tipped by `angle_rad` about the x axis.
inline perception::ImuSample tipped(double t_ms, double angle_rad) {
    return {t_ms, {0.0, std::sin(angle_rad), std::cos(angle_rad)}, {0.0, 0.0, 0.0}};
}

/// Rest for `rest_s`, rotate to upside down over `rotate_s`, hold for `hold_s`.
/// The accelerometer crosses the horizontal (inversion) at rest_s + rotate_s / 2.
inline std::vector<perception::ImuSample> flip_trace(double rest_s = 1.0, double rotate_s = 1.0, double hold_s = 1.0,
                                                     double rate_hz = 100.0) {
    std::vector<perception::ImuSample> out;
    const double dt = 1000.0 / rate_hz;
    const double end = (rest_s + rotate_s + hold_s) * 1000.0;
    for (int i = 0; i * dt <= end + 1e-9; ++i) {
        const double t = i * dt / 1000.0;
        const double u = std::clamp((t - rest_s) / rotate_s, 0.0, 1.0);
        out.push_back(tipped(i * dt, kPi * u));
    }
    return out;
}

/// Tip-and-return excursions of `peak_deg` starting at each time in `starts_s`.
/// Each excursion rises over 0.3 s, holds 0.2 s and returns over 0.3 s.
inline std::vector<perception::ImuSample> tilt_trace(const std::vector<double>& starts_s, double total_s,
                                                     double peak_deg = 30.0, double rate_hz = 100.0) {
    std::vector<perception::ImuSample> out;
    const double dt = 1000.0 / rate_hz;
    const double peak = peak_deg * kPi / 180.0;
    for (int i = 0; i * dt <= total_s * 1000.0 + 1e-9; ++i) {
        const double t = i * dt / 1000.0;
        double a = 0.0;
        for (double s : starts_s) {
            const double x = t - s;
            if (x >= 0.0 && x < 0.3) a = peak * x / 0.3;
            else if (x >= 0.3 && x < 0.5) a = peak;
            else if (x >= 0.5 && x < 0.8) a = peak * (0.8 - x) / 0.3;
        }
        out.push_back(tipped(i * dt, a));
    }
    return out;
}

/// Device at rest with independent Gaussian noise of `sigma_g` on every axis.
inline std::vector<perception::ImuSample> noise_trace(double total_s, double sigma_g, std::uint64_t seed,
                                                      double rate_hz = 100.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, sigma_g);
    std::vector<perception::ImuSample> out;
    const double dt = 1000.0 / rate_hz;
    for (int i = 0; i * dt <= total_s * 1000.0 + 1e-9; ++i)
        out.push_back({i * dt, {n(rng), n(rng), 1.0 + n(rng)}, {0.0, 0.0, 0.0}});
    return out;
}

struct ClickTrack {
    behaviors::AudioClip clip;
    std::vector<double> clicks_s;  ///< construction times
};

/// Full-scale clicks every 60/bpm s starting at `first_s`. `tone_hz` 0 gives
/// decaying white-noise bursts; otherwise sine bursts at that frequency.
inline ClickTrack click_track(double bpm, double duration_s, double rate_hz = 22050.0, double gain = 1.0,
                              double tone_hz = 0.0, double burst_s = 0.01, double first_s = 0.5,
                              std::uint64_t seed = 7) {
    ClickTrack t;
    t.clip.rate_hz = rate_hz;
    t.clip.samples.assign(static_cast<std::size_t>(duration_s * rate_hz), 0.0f);
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto burst = static_cast<std::size_t>(burst_s * rate_hz);
    for (double c = first_s; c + burst_s < duration_s; c += 60.0 / bpm) {
        t.clicks_s.push_back(c);
        const auto start = static_cast<std::size_t>(std::llround(c * rate_hz));
        for (std::size_t i = 0; i < burst && start + i < t.clip.samples.size(); ++i) {
            const double env = 1.0 - static_cast<double>(i) / static_cast<double>(burst);
            const double s = tone_hz > 0.0 ? std::sin(2.0 * kPi * tone_hz * static_cast<double>(i) / rate_hz) : u(rng);
            t.clip.samples[start + i] = static_cast<float>(gain * env * s);
        }
    }
    return t;
}

inline std::vector<double> column(const std::vector<telemetry::Row>& rows, double telemetry::Row::*field) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.*field);
    return out;
}

/// Fraction of `truth` matched by a distinct detection within `tol_s`.
inline double recall(const std::vector<double>& truth, const std::vector<double>& detected, double tol_s) {
    if (truth.empty()) return 1.0;
    std::vector<bool> used(detected.size(), false);
    std::size_t hits = 0;
    for (double t : truth) {
        for (std::size_t j = 0; j < detected.size(); ++j) {
            if (!used[j] && std::abs(detected[j] - t) <= tol_s) {
                used[j] = true;
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace lantern::testing
