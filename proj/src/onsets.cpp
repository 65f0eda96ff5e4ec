#include "lantern/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lantern::perception {

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0, z2 = 0.0;

    static Biquad lowpass(double rate_hz, double cutoff_hz, double q) {
        const double w0 = 2.0 * std::numbers::pi * cutoff_hz / rate_hz;
        const double alpha = std::sin(w0) / (2.0 * q);
        const double cw = std::cos(w0);
        const double a0 = 1.0 + alpha;
        return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0, (1.0 - alpha) / a0};
    }

    double process(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
};

std::vector<double> frame_energy(std::span<const float> pcm, const OnsetConfig& cfg) {
    const std::size_t frame = static_cast<std::size_t>(cfg.frame_size);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop_size);
    if (pcm.size() < frame) return {};
    std::vector<double> energy((pcm.size() - frame) / hop + 1);
    for (std::size_t i = 0; i < energy.size(); ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < frame; ++j) {
            const double x = pcm[i * hop + j];
            e += x * x;
        }
        energy[i] = e;
    }
    return energy;
}

/// `share_of`, when given, is the full-band energy: a frame only counts if it
/// carries at least `min_share` of it.
std::vector<OnsetEvent> detect_band(std::span<const float> pcm, const std::vector<double>& energy, double rate_hz,
                                    Band band, const OnsetConfig& cfg, const std::vector<double>* share_of = nullptr,
                                    double min_share = 0.0) {
    std::vector<OnsetEvent> out;
    const std::size_t frame = static_cast<std::size_t>(cfg.frame_size);
    const std::size_t hop = static_cast<std::size_t>(cfg.hop_size);
    const std::size_t n_frames = energy.size();

    const double floor_energy = cfg.min_mean_square * static_cast<double>(frame);
    const std::size_t history = static_cast<std::size_t>(cfg.history_frames);
    double trailing_sum = 0.0;
    std::optional<double> last_onset_s;

    for (std::size_t i = 0; i < n_frames; ++i) {
        const std::size_t count = std::min(i, history);
        if (count > 0) {
            const double mean = trailing_sum / static_cast<double>(count);
            const bool heavy = !share_of || energy[i] >= min_share * (*share_of)[i];
            if (heavy && energy[i] > floor_energy && energy[i] > cfg.threshold_ratio * mean) {
                // Place the onset at the first sample reaching 30% of the frame peak.
                const std::size_t begin = i * hop;
                double peak = 0.0;
                for (std::size_t j = 0; j < frame; ++j) peak = std::max(peak, std::abs(double(pcm[begin + j])));
                std::size_t first = 0;
                while (first < frame && std::abs(double(pcm[begin + first])) < 0.3 * peak) ++first;
                const double t_s = static_cast<double>(begin + first) / rate_hz;

                if (!last_onset_s || t_s - *last_onset_s >= cfg.refractory_s) {
                    const double strength = mean > 0.0 ? energy[i] / mean : energy[i] / floor_energy;
                    out.push_back({t_s * 1000.0, band, strength});
                    last_onset_s = t_s;
                }
            }
        }
        trailing_sum += energy[i];
        if (i >= history) trailing_sum -= energy[i - history];
    }
    return out;
}

}  // namespace

std::vector<OnsetEvent> OnsetAnalysis::band(Band b) const {
    std::vector<OnsetEvent> out;
    for (const auto& e : onsets)
        if (e.band == b) out.push_back(e);
    return out;
}

std::vector<float> lowpass_4th_order(std::span<const float> pcm, double rate_hz, double cutoff_hz) {
    // Butterworth pole pair Qs for N = 4.
    Biquad first = Biquad::lowpass(rate_hz, cutoff_hz, 0.54119610);
    Biquad second = Biquad::lowpass(rate_hz, cutoff_hz, 1.30656296);
    std::vector<float> out(pcm.size());
    for (std::size_t i = 0; i < pcm.size(); ++i)
        out[i] = static_cast<float>(second.process(first.process(pcm[i])));
    return out;
}

std::optional<double> estimate_tempo(std::span<const double> onset_times_s, const OnsetConfig& cfg) {
    if (static_cast<int>(onset_times_s.size()) < cfg.min_onsets_for_tempo) return std::nullopt;
    std::vector<double> intervals;
    for (std::size_t i = 1; i < onset_times_s.size(); ++i) intervals.push_back(onset_times_s[i] - onset_times_s[i - 1]);
    std::sort(intervals.begin(), intervals.end());
    const std::size_t n = intervals.size();
    const double median = n % 2 ? intervals[n / 2] : 0.5 * (intervals[n / 2 - 1] + intervals[n / 2]);
    if (!(median > 0.0)) return std::nullopt;

    double bpm = 60.0 / median;
    while (bpm < cfg.min_tempo_bpm) bpm *= 2.0;
    while (bpm > cfg.max_tempo_bpm) bpm /= 2.0;
    return bpm;
}

OnsetAnalysis detect_onsets(std::span<const float> pcm, double rate_hz, const OnsetConfig& cfg) {
    if (rate_hz < 8000.0) throw std::invalid_argument("detect_onsets: sample rate must be >= 8000 Hz");
    if (static_cast<double>(pcm.size()) < 2.0 * rate_hz)
        throw std::invalid_argument("detect_onsets: need at least 2 s of audio");

    OnsetAnalysis result;
    const auto full_energy = frame_energy(pcm, cfg);
    auto full = detect_band(pcm, full_energy, rate_hz, Band::full, cfg);
    const auto low = lowpass_4th_order(pcm, rate_hz, cfg.bass_cutoff_hz);
    auto bass = detect_band(low, frame_energy(low, cfg), rate_hz, Band::bass, cfg, &full_energy, cfg.bass_min_share);

    std::vector<double> times;
    for (const auto& e : full) times.push_back(e.t_ms / 1000.0);
    result.tempo_bpm = estimate_tempo(times, cfg);

    result.onsets = std::move(full);
    result.onsets.insert(result.onsets.end(), bass.begin(), bass.end());
    std::stable_sort(result.onsets.begin(), result.onsets.end(),
                     [](const OnsetEvent& a, const OnsetEvent& b) { return a.t_ms < b.t_ms; });
    return result;
}

}  // namespace lantern::perception
