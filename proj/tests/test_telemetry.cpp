#include "lantern/analysis.hpp"
#include "lantern/config.hpp"
#include "lantern/runner.hpp"
#include "lantern/telemetry.hpp"
#include "lantern/wav.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lantern;

TEST_CASE("csv header and round trip") {
    std::ostringstream out;
    telemetry::write_header(out);
    telemetry::Row r{10, 0.25, 140.5, 55.25, 0.5, {1, 2, 3}, "slow"};
    telemetry::write_row(out, r);
    CHECK(out.str() ==
          "t_ms,compression,height_mm,bulge_mm,vib,led0_r,led0_g,led0_b,active\n"
          "10,0.250000,140.5000,55.2500,0.500000,1,2,3,slow\n");
    std::istringstream in(out.str());
    const auto rows = telemetry::read_csv(in);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].active == "slow");
    CHECK(rows[0].led0 == Rgb{1, 2, 3});

    std::istringstream bad("t_ms,x\n");
    CHECK_THROWS_AS(telemetry::read_csv(bad), StreamError);
}

TEST_CASE("find_swings on a clean sine") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(std::sin(2 * testing::kPi * i / 100.0));
    const auto s = analysis::find_swings(v, 0.5);
    REQUIRE(s.maxima.size() == 10);
    CHECK(s.maxima[0].index == 25);
    CHECK(s.minima[1].index == 75);
}

TEST_CASE("find_swings ignores ripples below the prominence") {
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(0.5 + 0.4 * std::sin(2 * testing::kPi * i / 500.0) + 0.01 * std::sin(i));
    CHECK(analysis::find_swings(v, 0.1).maxima.size() == 2);
}

TEST_CASE("autocorr_period recovers constructed periods within a tick") {
    for (double period : {0.8, 2.5, 7.3}) {
        std::vector<double> v;
        for (int i = 0; i < 6000; ++i) v.push_back(std::pow(std::sin(testing::kPi * i * 0.01 / period), 2));
        const auto p = analysis::autocorr_period(v, 0.01, 0.2, 20.0);
        REQUIRE(p);
        CHECK(std::abs(*p - period) <= 0.01);
    }
    std::vector<double> flat(1000, 0.3);
    CHECK_FALSE(analysis::autocorr_period(flat, 0.01, 0.2, 5.0));
}

TEST_CASE("rising edges and dominant frequency") {
    std::vector<double> v(1000, 0.0);
    for (int k = 0; k < 1000; k += 250) v[k + 5] = 1.0;
    const auto e = analysis::rising_edges(v, 0.01, 0.5, 1.0);
    REQUIRE(e.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(e[i] == doctest::Approx(1.05 + 2.5 * i));
    const auto s = analysis::spacing_of(e);
    CHECK(s.mean == doctest::Approx(2.5));

    std::vector<double> tone;
    for (int i = 0; i < 5000; ++i) tone.push_back(std::sin(2 * testing::kPi * 13.0 * i * 0.001));
    CHECK(analysis::dominant_frequency(tone, 0.001, 1.0, 100.0, 0.05) == doctest::Approx(13.0).epsilon(0.005));
}

TEST_CASE("analyze a post-op run") {
    runner::RunOptions opts;
    opts.behavior = "postop";
    opts.params = {{"reps", 2}};
    const auto result = runner::run({}, opts);
    const auto rep = analysis::analyze(result.rows);
    CHECK(rep.maxima_t_s.size() == 8);
    for (std::size_t i = 3; i < rep.inhale_s.size(); i += 4) CHECK(std::abs(rep.inhale_s[i] - 4.0) <= 0.01);
    CHECK(rep.tick_s == doctest::Approx(0.01));
    const auto json = analysis::to_json(rep);
    CHECK(json.find("\"maxima\": 8") != std::string::npos);
}

TEST_CASE("runner: fixed duration gives duration/tick rows") {
    runner::RunOptions opts;
    opts.behavior = "slow";
    opts.duration_s = 30.0;
    std::ostringstream csv;
    const auto r = runner::run({}, opts, &csv);
    CHECK(r.rows.size() == 3000);
    CHECK(r.rows.back().t_ms == 30000);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 3001);
}

TEST_CASE("runner: unknown behavior lists the registry") {
    runner::RunOptions opts;
    opts.behavior = "nope";
    try {
        runner::run({}, opts);
        FAIL("expected UnknownBehavior");
    } catch (const runner::UnknownBehavior& e) {
        CHECK(std::string(e.what()).find("slow, bunny, dragon") != std::string::npos);
    }
}

TEST_CASE("runner: same options, same bytes") {
    runner::RunOptions opts;
    opts.behavior = "softtoy";
    opts.duration_s = 20.0;
    std::ostringstream a, b;
    runner::run({}, opts, &a, false);
    runner::run({}, opts, &b, false);
    CHECK(a.str() == b.str());
}

TEST_CASE("config parsing") {
    std::istringstream in(R"(
# comment
[device.shell]
strip_length_mm = 120
attach_radius_mm = 35   # trailing comment

[engine]
tick_ms = 5

[service]
host = "0.0.0.0"
control_port = 9000

[behavior.slow]
amplitude = 0.4
)");
    const auto cfg = config::parse_config(in);
    CHECK(cfg.device.shell.strip_length_mm == 120.0);
    CHECK(cfg.device.shell.max_compression_mm == doctest::Approx(42.0));
    CHECK(cfg.engine.tick_ms == 5);
    CHECK(cfg.device.tick_ms == 5);
    CHECK(cfg.service.host == "0.0.0.0");
    CHECK(cfg.service.control_port == 9000);
    CHECK(cfg.behavior_params.at("slow").at("amplitude") == 0.4);

    const auto defs = config::apply_behavior_overrides(behaviors::builtin_definitions(), cfg);
    for (const auto& d : defs)
        if (d.id == "slow") CHECK(d.defaults.at("amplitude") == 0.4);
}

TEST_CASE("config errors name the key") {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            config::parse_config(in);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("[device.shell]\nstrip_length_mm = -150\n").find("device.shell.strip_length_mm") != std::string::npos);
    CHECK(message("[device]\nbogus = 1\n").find("device.bogus") != std::string::npos);
    CHECK(message("[engine]\ntick_ms = fast\n").find("engine.tick_ms") != std::string::npos);
    CHECK(message("[behavior.slow]\nnonsense = 1\n").find("nonsense") != std::string::npos);
    CHECK(message("[behavior.ghost]\namplitude = 1\n").find("ghost") != std::string::npos);
    CHECK(message("[service]\ncontrol_port = 70000\n").find("service.control_port") != std::string::npos);
}

TEST_CASE("wav round trip through 16-bit PCM") {
    behaviors::AudioClip clip;
    clip.rate_hz = 22050;
    for (int i = 0; i < 2205; ++i) clip.samples.push_back(static_cast<float>(0.5 * std::sin(0.05 * i)));
    const auto path = (std::filesystem::temp_directory_path() / "lantern_wav_roundtrip.wav").string();
    wav::save(path, clip);
    const auto back = wav::load(path);
    std::remove(path.c_str());
    CHECK(back.rate_hz == 22050);
    REQUIRE(back.samples.size() == clip.samples.size());
    double worst = 0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        worst = std::max(worst, double(std::abs(back.samples[i] - clip.samples[i])));
    CHECK(worst < 1.0 / 32768 + 1e-6);
}

TEST_CASE("wav rejects a file that is not RIFF") {
    const auto path = (std::filesystem::temp_directory_path() / "lantern_not_wav.wav").string();
    std::ofstream(path) << "hello";
    CHECK_THROWS(wav::load(path));
    std::remove(path.c_str());
}
