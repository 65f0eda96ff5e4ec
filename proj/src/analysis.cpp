#include "lantern/analysis.hpp"

#include <fftw3.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace lantern::analysis {

Swings find_swings(std::span<const double> v, double min_prominence) {
    Swings out;
    if (v.empty()) return out;
    bool rising = true;
    Extremum lo{0, v[0]};
    Extremum hi{0, v[0]};
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (rising) {
            if (v[i] > hi.value) hi = {i, v[i]};
            if (hi.value - lo.value >= min_prominence && v[i] <= hi.value - min_prominence) {
                out.minima.push_back(lo);
                out.maxima.push_back(hi);
                rising = false;
                lo = {i, v[i]};
            } else if (v[i] < lo.value) {
                lo = {i, v[i]};
                hi = lo;
            }
        } else {
            if (v[i] < lo.value) lo = {i, v[i]};
            if (v[i] >= lo.value + min_prominence) {
                rising = true;
                hi = {i, v[i]};
            }
        }
    }
    return out;
}

namespace {

struct LagFunctions {
    std::vector<double> r;  ///< unbiased autocorrelation of the mean-removed signal
    std::vector<double> d;  ///< mean squared difference between the signal and its lagged copy
};

/// Both lag functions for lags [0, max_lag]; the cross term comes from one FFT.
LagFunctions lag_functions(std::span<const double> v, std::size_t max_lag) {
    const std::size_t n = v.size();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(n);
    std::size_t size = 1;
    while (size < 2 * n) size <<= 1;

    auto* buf = static_cast<double*>(fftw_malloc(sizeof(double) * size));
    auto* spec = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (size / 2 + 1)));
    const fftw_plan fwd = fftw_plan_dft_r2c_1d(static_cast<int>(size), buf, spec, FFTW_ESTIMATE);
    const fftw_plan inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec, buf, FFTW_ESTIMATE);
    std::vector<double> sq_prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
        buf[i] = i < n ? v[i] - mean : 0.0;
        if (i < n) sq_prefix[i + 1] = sq_prefix[i] + buf[i] * buf[i];
    }
    fftw_execute(fwd);
    for (std::size_t i = 0; i <= size / 2; ++i) {
        spec[i][0] = spec[i][0] * spec[i][0] + spec[i][1] * spec[i][1];
        spec[i][1] = 0.0;
    }
    fftw_execute(inv);

    LagFunctions out;
    out.r.assign(max_lag + 1, 0.0);
    out.d.assign(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag && lag < n; ++lag) {
        const double cross = buf[lag] / double(size);
        const double m = double(n - lag);
        out.r[lag] = cross / m;
        out.d[lag] = std::max(0.0, (sq_prefix[n - lag] + (sq_prefix[n] - sq_prefix[lag]) - 2.0 * cross) / m);
    }
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(buf);
    fftw_free(spec);
    return out;
}

/// Vertex of the parabola through (k-1, k, k+1); works for peaks and troughs.
double parabolic_vertex(const std::vector<double>& f, std::size_t k) {
    if (k == 0 || k + 1 >= f.size()) return double(k);
    const double a = f[k - 1], b = f[k], c = f[k + 1];
    const double denom = a - 2.0 * b + c;
    if (denom == 0.0) return double(k);
    return double(k) + 0.5 * (a - c) / denom;
}

}  // namespace

std::optional<double> autocorr_period(std::span<const double> v, double dt_s, double min_period_s, double max_period_s,
                                      double min_correlation) {
    if (v.size() < 4) return std::nullopt;
    const std::size_t n = v.size();
    const std::size_t max_lag = n / 2;
    const auto lf = lag_functions(v, max_lag);
    const auto& r = lf.r;
    const double scale = std::max(1.0, std::abs(std::accumulate(v.begin(), v.end(), 0.0) / double(n)));
    if (!(r[0] > 1e-12 * scale * scale)) return std::nullopt;

    const auto lo = static_cast<std::size_t>(std::max(1.0, std::floor(min_period_s / dt_s)));
    const auto hi = std::min(max_lag - 1, static_cast<std::size_t>(std::ceil(max_period_s / dt_s)));
    std::optional<std::size_t> first;
    for (std::size_t k = lo; k <= hi; ++k) {
        if (r[k] / r[0] >= min_correlation && r[k] >= r[k - 1] && r[k] >= r[k + 1]) {
            first = k;
            break;
        }
    }
    if (!first) return std::nullopt;

    // The correlation peak finds the period; the squared-difference trough,
    // which is sharp and not biased by partial periods, places it.
    auto trough_near = [&](double centre, double radius) {
        const auto from = static_cast<std::size_t>(std::max(1.0, std::floor(centre - radius)));
        const auto to = std::min(max_lag - 1, static_cast<std::size_t>(std::ceil(centre + radius)));
        std::size_t best = from;
        for (std::size_t k = from; k <= to; ++k)
            if (lf.d[k] < lf.d[best]) best = k;
        return best;
    };
    double period = parabolic_vertex(lf.d, trough_near(double(*first), 2.0));

    // Walk out through doubling multiples; each step keeps the error inside the search radius.
    for (std::size_t m = 2;; m *= 2) {
        const double centre = period * double(m);
        const double radius = std::max(2.0, period / 4.0);
        if (centre + radius >= double(max_lag - 1)) break;
        const std::size_t best = trough_near(centre, radius);
        if (r[best] / r[0] < min_correlation) break;
        period = parabolic_vertex(lf.d, best) / double(m);
    }
    return period * dt_s;
}

std::vector<double> rising_edges(std::span<const double> v, double dt_s, double threshold, double t0_s) {
    std::vector<double> out;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] <= threshold && v[i] > threshold) out.push_back(t0_s + double(i) * dt_s);
    if (!v.empty() && v[0] > threshold) out.insert(out.begin(), t0_s);
    return out;
}

double dominant_frequency(std::span<const double> v, double dt_s, double f_lo, double f_hi, double df) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(std::max<std::size_t>(1, v.size()));
    double best_f = f_lo;
    double best_mag = -1.0;
    for (double f = f_lo; f <= f_hi + 1e-12; f += df) {
        std::complex<double> acc{0.0, 0.0};
        const double w = -2.0 * std::numbers::pi * f * dt_s;
        for (std::size_t i = 0; i < v.size(); ++i) acc += (v[i] - mean) * std::polar(1.0, w * double(i));
        if (std::abs(acc) > best_mag) {
            best_mag = std::abs(acc);
            best_f = f;
        }
    }
    return best_f;
}

Spacing spacing_of(std::span<const double> times) {
    Spacing s;
    if (times.size() < 2) return s;
    s.count = times.size() - 1;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -s.min;
    double sum = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1];
        sum += d;
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
    }
    s.mean = sum / double(s.count);
    return s;
}

TraceReport analyze(const std::vector<telemetry::Row>& rows, double min_prominence) {
    TraceReport rep;
    rep.rows = rows.size();
    if (rows.empty()) return rep;
    rep.tick_s = rows.size() > 1 ? double(rows[1].t_ms - rows[0].t_ms) / 1000.0 : 0.0;
    rep.duration_s = double(rows.back().t_ms - rows.front().t_ms) / 1000.0 + rep.tick_s;
    const double t0 = double(rows.front().t_ms) / 1000.0;

    std::vector<double> comp, vib;
    for (const auto& r : rows) {
        comp.push_back(r.compression);
        vib.push_back(r.vib);
    }
    rep.compression_min = *std::min_element(comp.begin(), comp.end());
    rep.compression_max = *std::max_element(comp.begin(), comp.end());

    const auto swings = find_swings(comp, min_prominence);
    for (std::size_t i = 0; i < swings.maxima.size(); ++i) {
        rep.maxima_t_s.push_back(t0 + double(swings.maxima[i].index) * rep.tick_s);
        rep.inhale_s.push_back(double(swings.maxima[i].index - swings.minima[i].index) * rep.tick_s);
    }
    if (rep.tick_s > 0.0) {
        rep.compression_period_s = autocorr_period(comp, rep.tick_s, 2.0 * rep.tick_s, rep.duration_s / 2.0);
        rep.pulse_t_s = rising_edges(vib, rep.tick_s, 1e-9, t0);
    }
    rep.pulse_spacing = spacing_of(rep.pulse_t_s);
    rep.led_first = rows.front().led0;
    rep.led_last = rows.back().led0;
    return rep;
}

std::string to_json(const TraceReport& r) {
    nlohmann::ordered_json j;
    j["rows"] = r.rows;
    j["tick_s"] = r.tick_s;
    j["duration_s"] = r.duration_s;
    j["compression_min"] = r.compression_min;
    j["compression_max"] = r.compression_max;
    j["maxima"] = r.maxima_t_s.size();
    j["maxima_t_s"] = r.maxima_t_s;
    j["inhale_s"] = r.inhale_s;
    j["compression_period_s"] = r.compression_period_s ? nlohmann::ordered_json(*r.compression_period_s) : nlohmann::ordered_json(nullptr);
    j["pulses"] = r.pulse_t_s.size();
    j["pulse_spacing_mean_s"] = r.pulse_spacing.mean;
    j["pulse_spacing_min_s"] = r.pulse_spacing.min;
    j["pulse_spacing_max_s"] = r.pulse_spacing.max;
    j["led_first"] = {r.led_first.r, r.led_first.g, r.led_first.b};
    j["led_last"] = {r.led_last.r, r.led_last.g, r.led_last.b};
    return j.dump(2);
}

}  // namespace lantern::analysis
