// Acceptance runner: one PASS/FAIL line per headline criterion.
// Exit status is non-zero if any criterion fails.

#include "lantern/analysis.hpp"
#include "lantern/kinematics.hpp"
#include "lantern/protocol.hpp"
#include "lantern/runner.hpp"
#include "lantern/service.hpp"

#include "message_gen.hpp"
#include "support.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace lantern;
using namespace lantern::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool ok = true;
    std::vector<std::string> notes;

    void check(bool cond, const std::string& what) {
        if (!cond) ok = false;
        notes.push_back(std::string(cond ? "" : "!! ") + what);
    }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    o.check(wall < limit_s, "runtime " + fmt("%.2f", wall) + " s < " + fmt("%.0f", limit_s) + " s");
    if (!o.ok) ++failures;
    std::cout << (o.ok ? "PASS " : "FAIL ") << name << ": ";
    for (std::size_t i = 0; i < o.notes.size(); ++i) std::cout << (i ? "; " : "") << o.notes[i];
    std::cout << std::endl;
}

std::vector<std::int64_t> phase_times(const runner::RunResult& r, const std::string& phase) {
    std::vector<std::int64_t> out;
    for (const auto& n : r.notices)
        if (n.kind == engine::Notice::Kind::phase && n.detail == phase) out.push_back(n.t_ms);
    return out;
}

void kinematics_suite(Outcome& o) {
    using namespace kinematics;
    ShellConfig cfg;
    double worst = 0.0;
    bool monotone = true;
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
        const auto g = geometry_at(i / 999.0, cfg);
        worst = std::max(worst, std::abs(reconstructed_arc_length(g) - cfg.strip_length_mm) / cfg.strip_length_mm);
        monotone &= g.bulge_radius_mm > prev;
        prev = g.bulge_radius_mm;
    }
    o.check(worst < 1e-6, "arc-length rel error " + fmt("%.2e", worst) + " < 1e-6 over 1000 points");
    const auto semi = solve_arc(2.0 / kPi);
    const double err = std::max(std::abs(semi.sagitta_ratio - 1.0 / kPi), std::abs(semi.half_angle_rad - kPi / 2));
    o.check(err < 1e-9, "semicircle sagitta L/pi error " + fmt("%.2e", err) + " < 1e-9");
    o.check(monotone, "bulge strictly increasing in compression");
}

void postop_suite(Outcome& o) {
    const auto out = std::filesystem::temp_directory_path() / "lantern-acceptance-postop.csv";
    const std::string cmd =
        std::string(LANTERN_BIN) + " run --behavior postop --reps 2 --accel 10 --quiet --out " + out.string();
    const int status = std::system(cmd.c_str());
    o.check(WIFEXITED(status) && WEXITSTATUS(status) == 0, "CLI exit 0");
    std::ifstream in(out);
    const auto rows = telemetry::read_csv(in);
    const auto rep = analysis::analyze(rows);
    o.check(rep.maxima_t_s.size() == 8, "maxima " + std::to_string(rep.maxima_t_s.size()) + " == 8");
    bool bounded = rep.inhale_s.size() == 8;
    bool defaulted = bounded;
    std::string deep;
    for (std::size_t i = 3; i < rep.inhale_s.size(); i += 4) {
        bounded &= rep.inhale_s[i] >= 3.0 && rep.inhale_s[i] <= 5.0;
        defaulted &= std::abs(rep.inhale_s[i] - 4.0) <= rep.tick_s + 1e-9;
        deep += (deep.empty() ? "" : ",") + fmt("%.2f", rep.inhale_s[i]);
    }
    o.check(bounded, "deep inhales [" + deep + "] s within [3,5]");
    o.check(defaulted, "deep inhale 4.0 s +/- 1 tick");
}

void circadian_suite(Outcome& o) {
    runner::RunOptions opts;
    opts.behavior = "circadian";
    opts.params = {{"alarm_s", 1800.0}};
    perception::SensorTrace flip;
    flip.imu = flip_trace(1.0, 1.0, 1.0);
    opts.sensors = flip;
    opts.sensors_at_s = 1830.0;  // ALARM begins at 1800 s
    opts.accel = 0.0;
    const auto t0 = Clock::now();
    const auto r = runner::run({}, opts);
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    const double sim = r.rows.empty() ? 0.0 : r.rows.back().t_ms / 1000.0;
    o.notes.push_back("unpaced clock, " + fmt("%.0f", sim / wall) + "x real time (100x pacing would take " +
                      fmt("%.0f", sim / 100.0) + " s)");

    const auto alarm = phase_times(r, "ALARM");
    const auto dismissed = phase_times(r, "DISMISSED");
    o.check(alarm.size() == 1, "entered ALARM once");
    if (alarm.size() != 1) return;
    const double dawn_s = (alarm[0] - r.rows.front().t_ms) / 1000.0;
    o.check(std::abs(dawn_s - 1800.0) <= 1.0, "DAWN lasted " + fmt("%.2f", dawn_s) + " s (1800 +/- 1)");

    Rgb first = r.rows.front().led0, last_dawn{};
    std::vector<double> vib;
    std::int64_t alarm_start = alarm[0];
    std::int64_t alarm_end = dismissed.empty() ? r.rows.back().t_ms : dismissed[0];
    for (const auto& row : r.rows) {
        if (row.t_ms < alarm_start) last_dawn = row.led0;
        if (row.t_ms >= alarm_start && row.t_ms < alarm_end) vib.push_back(row.vib);
    }
    o.check(first == Rgb{139, 0, 0}, "first LED (" + std::to_string(first.r) + "," + std::to_string(first.g) + "," +
                                         std::to_string(first.b) + ")");
    o.check(last_dawn == Rgb{255, 214, 70}, "end-of-dawn LED (" + std::to_string(last_dawn.r) + "," +
                                                std::to_string(last_dawn.g) + "," + std::to_string(last_dawn.b) + ")");
    const auto pulses = analysis::rising_edges(vib, 0.01, 0.0, alarm_start / 1000.0);
    const auto sp = analysis::spacing_of(pulses);
    const bool spacing_ok = sp.count >= 3 && std::abs(sp.min - 5.0) <= 0.01 + 1e-9 && std::abs(sp.max - 5.0) <= 0.01 + 1e-9;
    o.check(spacing_ok, std::to_string(pulses.size()) + " ALARM pulses, spacing " + fmt("%.3f", sp.min) + ".." +
                            fmt("%.3f", sp.max) + " s (5.000 +/- 0.010)");
    o.check(dismissed.size() == 1, "flip trace reached DISMISSED" +
                                       (dismissed.empty() ? std::string() : " at " + fmt("%.2f", dismissed[0] / 1000.0) + " s"));
}

void purr_suite(Outcome& o) {
    runner::RunOptions opts;
    opts.behavior = "softtoy";
    opts.duration_s = 60.0;
    const auto r = runner::run({}, opts);
    const auto vib = column(r.rows, &telemetry::Row::vib);
    // Spectrum of the plateau samples only (gate fully open).
    std::vector<double> plateau;
    for (const auto& row : r.rows) {
        const double t = std::fmod((row.t_ms - r.rows.front().t_ms) / 1000.0, 10.0);
        if (t >= 1.25 && t < 3.75) plateau.push_back(row.vib);
    }
    const double peak = analysis::dominant_frequency(plateau, 0.01, 1.0, 49.0, 0.01);
    o.check(std::abs(peak - 20.0) <= 1.0, "plateau spectral peak " + fmt("%.2f", peak) + " Hz (20 +/- 1)");
    const auto edges = analysis::rising_edges(vib, 0.01, 1e-9, 0.01);
    const auto sp = analysis::spacing_of(edges);
    const bool ok = sp.count >= 4 && std::abs(sp.min - 10.0) <= 0.2 && std::abs(sp.max - 10.0) <= 0.2;
    o.check(ok, std::to_string(edges.size()) + " bursts, gate period " + fmt("%.3f", sp.min) + ".." +
                    fmt("%.3f", sp.max) + " s (10 +/- 0.2)");
}

void beat_suite(Outcome& o) {
    for (double bpm : {60.0, 120.0, 180.0}) {
        const auto track = click_track(bpm, 30.0);
        const auto a = perception::detect_onsets(track.clip.samples, track.clip.rate_hz);
        std::vector<double> det;
        for (const auto& e : a.band(perception::Band::full)) det.push_back(e.t_ms / 1000.0);
        const double rec = recall(track.clicks_s, det, 0.030);
        const std::string tag = fmt("%.0f", bpm) + " BPM: ";
        o.check(rec >= 0.95, tag + "recall " + fmt("%.3f", rec) + " (>= 0.95 within 30 ms)");
        o.check(a.tempo_bpm && std::abs(*a.tempo_bpm - bpm) <= 2.0,
                tag + "tempo " + (a.tempo_bpm ? fmt("%.2f", *a.tempo_bpm) : std::string("none")));

        runner::RunOptions opts;
        opts.behavior = "speaker";
        opts.audio = track.clip;
        const auto r = runner::run({}, opts);
        const auto servo = column(r.rows, &telemetry::Row::compression);
        const double beat = 60.0 / bpm;
        const auto period = analysis::autocorr_period(servo, 0.01, 0.2, 8.0);
        o.check(period && std::abs(*period - beat) <= 0.02 * beat,
                tag + "servo cycle " + (period ? fmt("%.4f", *period) : std::string("none")) + " s vs beat " +
                    fmt("%.4f", beat) + " (+/- 2%)");
    }
    runner::RunOptions opts;
    opts.behavior = "speaker";
    opts.audio = behaviors::AudioClip{std::vector<float>(22050 * 20, 0.0f), 22050.0};
    const auto r = runner::run({}, opts);
    const auto period = analysis::autocorr_period(column(r.rows, &telemetry::Row::compression), 0.01, 0.5, 10.0);
    o.check(period && std::abs(*period - 4.0) <= 0.01,
            "silence: fallback cycle " + (period ? fmt("%.3f", *period) : std::string("none")) + " s");
}

void gesture_suite(Outcome& o) {
    using perception::GestureKind;
    auto names = [](const std::vector<perception::GestureEvent>& ev) {
        std::string s;
        for (const auto& e : ev) s += (s.empty() ? "" : ",") + perception::to_string(e.kind);
        return s.empty() ? std::string("none") : s;
    };
    const auto flip = perception::detect_tilt_flip(flip_trace(1.0, 1.0, 1.0));
    o.check(flip.size() == 1 && flip[0].kind == GestureKind::Flip, "flip trace -> " + names(flip));
    const auto tilts = perception::detect_tilt_flip(tilt_trace({1.0, 4.0}, 7.0));
    o.check(names(tilts) == "Tilt,Tilt,TwoTilts", "two-tilt trace -> " + names(tilts));
    const auto noise = perception::detect_tilt_flip(noise_trace(60.0, 0.05, 11));
    o.check(noise.empty(), "60 s noise (0.05 g) -> " + std::to_string(noise.size()) + " events");
}

void exclusivity_suite(Outcome& o) {
    const std::vector<std::string> ids = {"slow", "bunny", "dragon", "heartbeat", "postop", "softtoy", "circadian"};
    std::mt19937_64 rng(7);
    std::int64_t ticks = 0, shared = 0;
    for (int seq = 0; seq < 1000; ++seq) {
        engine::Engine e;
        std::uniform_int_distribution<int> op(0, 9), pick(0, static_cast<int>(ids.size()) - 1), gap(1, 30);
        for (int step = 0; step < 40; ++step) {
            const auto& id = ids[pick(rng)];
            const Params p = id == "circadian" ? Params{{"alarm_s", 1.0}} : Params{};
            switch (op(rng)) {
                case 0: case 1: case 2: e.start(id, p); break;
                case 3: case 4: e.start(id, p, true); break;
                case 5: case 6: e.stop(id); break;
                case 7: e.inject(perception::GestureKind::Flip); break;
                case 8: e.inject(perception::GestureKind::TwoTilts, "imu"); break;
                default: break;
            }
            for (int k = gap(rng); k > 0; --k) {
                e.tick();
                ++ticks;
                if (e.servo_writers_last_tick() > 1) ++shared;
            }
        }
    }
    o.check(shared == 0, "1000 sequences, " + std::to_string(ticks) + " ticks, " + std::to_string(shared) +
                             " with two servo owners");

    const auto dir = std::filesystem::temp_directory_path();
    std::string bytes[2];
    for (int i = 0; i < 2; ++i) {
        const auto path = dir / ("lantern-acceptance-det" + std::to_string(i) + ".csv");
        const std::string cmd =
            std::string(LANTERN_BIN) + " run --behavior circadian --params alarm_s=60 ramp_s=60 --duration 90 --seed 5 --quiet --out " +
            path.string();
        if (std::system(cmd.c_str()) != 0) throw std::runtime_error("CLI run failed");
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        bytes[i] = ss.str();
    }
    o.check(!bytes[0].empty() && bytes[0] == bytes[1],
            "repeated CLI runs byte-identical (" + std::to_string(bytes[0].size()) + " bytes)");
}

void protocol_suite(Outcome& o) {
    MessageGen gen(20240);
    int same = 0;
    for (int i = 0; i < 500; ++i) {
        const auto m = gen.next();
        const auto line = protocol::encode(m);
        const auto back = protocol::decode(line);
        same += back == m && protocol::encode(back) == line;
    }
    o.check(same == 500, std::to_string(same) + "/500 messages round-trip");

    std::vector<std::int64_t> stamps;
    std::mutex mu;
    service::EngineLoop loop(engine::Engine{}, devicesim::Device{}, 0.0);
    loop.add_observer([&](const service::TickResult& t) {
        std::lock_guard lock(mu);
        stamps.push_back(t.frame.t_ms);
    });
    config::ServiceConfig cfg;
    cfg.control_port = 0;
    cfg.ws_port = 0;
    cfg.queue_frames = 64;
    service::Server server(loop, cfg);
    server.start();
    service::LineClient stalled("127.0.0.1", server.control_port());
    stalled.send({protocol::kVersion, 1, "subscribe", {{"every", 1}}});
    loop.start();
    (void)loop.submit([](engine::Engine& e) { return e.start("softtoy"); });
    const auto deadline = Clock::now() + std::chrono::seconds(6);
    while (server.dropped_telemetry() < 1000 && Clock::now() < deadline)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    server.stop();
    loop.stop();
    std::size_t bad = 0;
    for (std::size_t k = 0; k < stamps.size(); ++k) bad += stamps[k] != static_cast<std::int64_t>(10 * (k + 1));
    o.check(server.dropped_telemetry() > 0,
            "stalled subscriber: " + std::to_string(server.dropped_telemetry()) + " frames dropped");
    o.check(bad == 0 && stamps.size() > 1000,
            std::to_string(stamps.size()) + " ticks, " + std::to_string(bad) + " off the k*tick grid");
}

}  // namespace

int main() {
    criterion("kinematics", 1.0, kinematics_suite);
    criterion("postop", 5.0, postop_suite);
    criterion("circadian", 10.0, circadian_suite);
    criterion("purr", 5.0, purr_suite);
    criterion("beat-sync", 10.0, beat_suite);
    criterion("gestures", 2.0, gesture_suite);
    criterion("exclusivity", 30.0, exclusivity_suite);
    criterion("protocol", 10.0, protocol_suite);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failures ? 1 : 0;
}
