#include "lantern/perception.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace lantern::perception {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

}  // namespace

std::string to_string(GestureKind kind) {
    switch (kind) {
        case GestureKind::Tilt: return "Tilt";
        case GestureKind::TwoTilts: return "TwoTilts";
        case GestureKind::Flip: return "Flip";
        case GestureKind::TouchStart: return "TouchStart";
        case GestureKind::TouchEnd: return "TouchEnd";
    }
    return "?";
}

std::optional<GestureKind> gesture_from_string(const std::string& name) {
    for (auto k : {GestureKind::Tilt, GestureKind::TwoTilts, GestureKind::Flip, GestureKind::TouchStart,
                   GestureKind::TouchEnd}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

GestureDetector::GestureDetector(GestureConfig cfg) : cfg_(cfg) {}

void GestureDetector::emit(std::vector<GestureEvent>& out, GestureKind kind, double t_ms) {
    auto& last = last_emit_[static_cast<std::size_t>(kind)];
    if (last && t_ms - *last < cfg_.refractory_s * 1000.0) return;
    last = t_ms;
    out.push_back({kind, t_ms, std::nullopt});
}

std::vector<GestureEvent> GestureDetector::push(const ImuSample& s) {
    if (have_last_ && s.t_ms < last_t_)
        throw StreamError("IMU timestamps must be monotone (" + std::to_string(s.t_ms) + " after " +
                          std::to_string(last_t_) + ")");
    have_last_ = true;
    last_t_ = s.t_ms;

    std::vector<GestureEvent> out;

    if (!ref_ready_) {
        if (ref_count_ == 0) ref_t0_ = s.t_ms;
        if (s.t_ms - ref_t0_ < cfg_.reference_window_s * 1000.0) {
            for (int i = 0; i < 3; ++i) ref_sum_[i] += s.accel_g[i];
            ++ref_count_;
            return out;
        }
        const double n = norm(ref_sum_);
        if (n > 1e-9) ref_ = {ref_sum_[0] / n, ref_sum_[1] / n, ref_sum_[2] / n};
        ref_ready_ = true;
    }

    const double magnitude = norm(s.accel_g);
    if (magnitude < 1e-6) return out;

    const double along_gravity = dot(s.accel_g, ref_);
    const double angle_deg = rad_to_deg(std::acos(std::clamp(along_gravity / magnitude, -1.0, 1.0)));
    const double t = s.t_ms;

    // Flip: gravity component inverted and held.
    if (along_gravity < 0.0) {
        if (!inverted_) {
            inverted_ = true;
            inverted_since_ = t;
        }
        if (!flip_fired_ && t - inverted_since_ >= cfg_.flip_hold_s * 1000.0) {
            flip_fired_ = true;
            emit(out, GestureKind::Flip, t);
        }
    } else {
        inverted_ = false;
        flip_fired_ = false;
    }

    // Tilt: out past the enter angle and back under the exit angle in time.
    switch (tilt_state_) {
        case TiltState::rest:
            if (angle_deg > cfg_.tilt_enter_deg) {
                tilt_state_ = TiltState::excursion;
                excursion_start_ = t;
                excursion_peak_deg_ = angle_deg;
            }
            break;
        case TiltState::excursion:
            excursion_peak_deg_ = std::max(excursion_peak_deg_, angle_deg);
            if (t - excursion_start_ > cfg_.tilt_window_s * 1000.0) {
                tilt_state_ = angle_deg < cfg_.tilt_exit_deg ? TiltState::rest : TiltState::abandoned;
            } else if (angle_deg < cfg_.tilt_exit_deg) {
                tilt_state_ = TiltState::rest;
                // An excursion through inversion is a flip, not a tilt.
                if (excursion_peak_deg_ < 90.0) {
                    const auto before = out.size();
                    emit(out, GestureKind::Tilt, t);
                    if (out.size() > before) {
                        if (unpaired_tilt_ && t - *unpaired_tilt_ <= cfg_.two_tilt_window_s * 1000.0) {
                            emit(out, GestureKind::TwoTilts, t);
                            unpaired_tilt_.reset();
                        } else {
                            unpaired_tilt_ = t;
                        }
                    }
                }
            }
            break;
        case TiltState::abandoned:
            if (angle_deg < cfg_.tilt_exit_deg) tilt_state_ = TiltState::rest;
            break;
    }
    return out;
}

std::vector<GestureEvent> detect_tilt_flip(std::span<const ImuSample> stream, const GestureConfig& cfg) {
    if (stream.size() >= 2) {
        const double span_s = (stream.back().t_ms - stream.front().t_ms) / 1000.0;
        const double rate = span_s > 0 ? (stream.size() - 1) / span_s : 0.0;
        if (rate < cfg.min_rate_hz)
            throw StreamError("IMU stream rate " + std::to_string(rate) + " Hz is below the minimum " +
                              std::to_string(cfg.min_rate_hz) + " Hz");
    }
    GestureDetector detector(cfg);
    std::vector<GestureEvent> events;
    for (const auto& s : stream) {
        auto ev = detector.push(s);
        events.insert(events.end(), ev.begin(), ev.end());
    }
    return events;
}

SensorTrace parse_trace(std::istream& in) {
    SensorTrace trace;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double t = 0;
        if (!(ls >> t)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw StreamError("trace line " + std::to_string(line_no) + ": expected a timestamp");
        }
        std::string second;
        if (!(ls >> second))
            throw StreamError("trace line " + std::to_string(line_no) + ": missing fields");
        if (second == "touch") {
            TouchSample touch;
            touch.t_ms = t;
            int state = 0;
            if (!(ls >> touch.zone >> state))
                throw StreamError("trace line " + std::to_string(line_no) + ": expected 'touch <zone> <0|1>'");
            touch.down = state != 0;
            trace.touch.push_back(touch);
            continue;
        }
        ImuSample s;
        s.t_ms = t;
        try {
            s.accel_g[0] = std::stod(second);
        } catch (const std::exception&) {
            throw StreamError("trace line " + std::to_string(line_no) + ": bad number '" + second + "'");
        }
        if (!(ls >> s.accel_g[1] >> s.accel_g[2] >> s.gyro_dps[0] >> s.gyro_dps[1] >> s.gyro_dps[2]))
            throw StreamError("trace line " + std::to_string(line_no) + ": expected 7 numbers");
        if (!trace.imu.empty() && t < trace.imu.back().t_ms)
            throw StreamError("trace line " + std::to_string(line_no) + ": timestamps must be monotone");
        trace.imu.push_back(s);
    }
    return trace;
}

SensorTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StreamError("cannot open sensor trace '" + path + "'");
    return parse_trace(in);
}

void write_trace(std::ostream& out, const SensorTrace& trace) {
    out.precision(10);
    for (const auto& s : trace.imu) {
        out << s.t_ms << ' ' << s.accel_g[0] << ' ' << s.accel_g[1] << ' ' << s.accel_g[2] << ' ' << s.gyro_dps[0]
            << ' ' << s.gyro_dps[1] << ' ' << s.gyro_dps[2] << '\n';
    }
    for (const auto& t : trace.touch) out << t.t_ms << " touch " << t.zone << ' ' << (t.down ? 1 : 0) << '\n';
}

}  // namespace lantern::perception
