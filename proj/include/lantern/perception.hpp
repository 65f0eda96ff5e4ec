#pragma once

#include "lantern/types.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lantern::perception {

using Vec3 = std::array<double, 3>;

struct ImuSample {
    double t_ms = 0.0;
    Vec3 accel_g{0.0, 0.0, 1.0};
    Vec3 gyro_dps{0.0, 0.0, 0.0};
};

struct TouchSample {
    double t_ms = 0.0;
    int zone = 0;
    bool down = false;
};

enum class GestureKind { Tilt, TwoTilts, Flip, TouchStart, TouchEnd };

std::string to_string(GestureKind kind);
std::optional<GestureKind> gesture_from_string(const std::string& name);

struct GestureEvent {
    GestureKind kind = GestureKind::Tilt;
    double t_ms = 0.0;
    std::optional<int> zone;

    friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

struct GestureConfig {
    double tilt_enter_deg = 25.0;
    double tilt_exit_deg = 10.0;
    double tilt_window_s = 2.0;
    double two_tilt_window_s = 5.0;
    double flip_hold_s = 0.5;
    double refractory_s = 0.3;
    double reference_window_s = 0.5;
    double min_rate_hz = 20.0;
};

/// Streaming tilt / flip recognizer for one IMU stream.
///
/// The gravity reference is the mean accelerometer direction over the first
/// `reference_window_s` of the stream; no gestures are reported before it is
/// established.
class GestureDetector {
public:
    explicit GestureDetector(GestureConfig cfg = {});

    /// Throws StreamError if `s` is older than the previous sample.
    std::vector<GestureEvent> push(const ImuSample& s);

    bool reference_ready() const { return ref_ready_; }
    const Vec3& reference() const { return ref_; }

private:
    enum class TiltState { rest, excursion, abandoned };

    void emit(std::vector<GestureEvent>& out, GestureKind kind, double t_ms);

    GestureConfig cfg_;
    bool have_last_ = false;
    double last_t_ = 0.0;

    bool ref_ready_ = false;
    double ref_t0_ = 0.0;
    Vec3 ref_sum_{0.0, 0.0, 0.0};
    int ref_count_ = 0;
    Vec3 ref_{0.0, 0.0, 1.0};

    TiltState tilt_state_ = TiltState::rest;
    double excursion_start_ = 0.0;
    double excursion_peak_deg_ = 0.0;
    std::optional<double> unpaired_tilt_;

    bool inverted_ = false;
    bool flip_fired_ = false;
    double inverted_since_ = 0.0;

    std::array<std::optional<double>, 5> last_emit_{};
};

/// Batch form; additionally rejects streams sampled below `min_rate_hz`.
std::vector<GestureEvent> detect_tilt_flip(std::span<const ImuSample> stream, const GestureConfig& cfg = {});

/// Replayable sensor script. Lines are `t_ms ax ay az gx gy gz`, or
/// `t_ms touch <zone> <0|1>`; `#` starts a comment.
struct SensorTrace {
    std::vector<ImuSample> imu;
    std::vector<TouchSample> touch;
};

SensorTrace parse_trace(std::istream& in);
SensorTrace load_trace(const std::string& path);
void write_trace(std::ostream& out, const SensorTrace& trace);

// Audio onsets ---------------------------------------------------------------

enum class Band { full, bass };

struct OnsetEvent {
    double t_ms = 0.0;
    Band band = Band::full;
    double strength = 0.0;  ///< frame energy over trailing mean
};

struct OnsetConfig {
    int frame_size = 1024;
    int hop_size = 512;
    int history_frames = 43;
    double threshold_ratio = 1.5;
    double refractory_s = 0.25;
    double bass_cutoff_hz = 150.0;
    double bass_min_share = 0.1;  ///< bass onsets need this fraction of the frame's full-band energy
    double min_mean_square = 1e-10;  ///< frames quieter than this never trigger
    double min_tempo_bpm = 60.0;
    double max_tempo_bpm = 180.0;
    int min_onsets_for_tempo = 4;
};

struct OnsetAnalysis {
    std::vector<OnsetEvent> onsets;   ///< both bands, sorted by time
    std::optional<double> tempo_bpm;  ///< empty when too few full-band onsets

    std::vector<OnsetEvent> band(Band b) const;
};

/// Energy-threshold detector on the full band and on a 4th-order 150 Hz
/// low-passed copy. Requires rate >= 8 kHz and at least 2 s of audio.
OnsetAnalysis detect_onsets(std::span<const float> pcm, double rate_hz, const OnsetConfig& cfg = {});

/// 60 / median inter-onset interval, folded by octaves into the tempo range.
std::optional<double> estimate_tempo(std::span<const double> onset_times_s, const OnsetConfig& cfg = {});

/// Cascaded Butterworth low-pass (two RBJ biquads).
std::vector<float> lowpass_4th_order(std::span<const float> pcm, double rate_hz, double cutoff_hz);

}  // namespace lantern::perception
