#pragma once

#include "lantern/telemetry.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

// Trace measurements shared by `lantern analyze` and the acceptance suite.

namespace lantern::analysis {

struct Extremum {
    std::size_t index = 0;
    double value = 0.0;
};

/// Turning points that rise and fall by at least `min_prominence`.
/// `minima[i]` is the trough that precedes `maxima[i]`.
struct Swings {
    std::vector<Extremum> maxima;
    std::vector<Extremum> minima;
};

Swings find_swings(std::span<const double> v, double min_prominence);

/// Fundamental period by autocorrelation, refined on a multiple of the first
/// peak. Returns nothing when no peak above `min_correlation` exists.
std::optional<double> autocorr_period(std::span<const double> v, double dt_s, double min_period_s,
                                      double max_period_s, double min_correlation = 0.5);

/// Times (t0 + i·dt) at which v steps from <= threshold to above it.
std::vector<double> rising_edges(std::span<const double> v, double dt_s, double threshold, double t0_s = 0.0);

/// Frequency of the largest DFT magnitude in [f_lo, f_hi], mean removed.
double dominant_frequency(std::span<const double> v, double dt_s, double f_lo, double f_hi, double df);

struct Spacing {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

Spacing spacing_of(std::span<const double> times);

struct TraceReport {
    std::size_t rows = 0;
    double tick_s = 0.0;
    double duration_s = 0.0;
    double compression_min = 0.0;
    double compression_max = 0.0;
    std::vector<double> maxima_t_s;
    std::vector<double> inhale_s;  ///< trough-to-peak time for each maximum
    std::optional<double> compression_period_s;
    std::vector<double> pulse_t_s;  ///< vibration rising edges
    Spacing pulse_spacing;
    Rgb led_first;
    Rgb led_last;
};

TraceReport analyze(const std::vector<telemetry::Row>& rows, double min_prominence = 0.05);
std::string to_json(const TraceReport& report);

}  // namespace lantern::analysis
