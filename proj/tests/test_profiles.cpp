#include "lantern/analysis.hpp"
#include "lantern/profiles.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace lantern;
using namespace lantern::profiles;

TEST_CASE("breath_value examples") {
    BreathPattern p;
    CHECK(breath_value(0.0, p) == 0.0);
    CHECK(breath_value(p.inhale_s, p) == doctest::Approx(p.amplitude));
    BreathPattern unit = p;
    unit.amplitude = 1.0;
    CHECK(breath_value(unit.inhale_s / 2, unit) == doctest::Approx(0.5));
    CHECK(breath_value(unit.period(), unit) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("breath holds keep the level") {
    const auto d = patterns::dragon();
    CHECK(d.amplitude == 1.0);
    CHECK(breath_value(d.inhale_s + 0.5, d) == doctest::Approx(1.0));
    CHECK(breath_value(d.inhale_s + d.hold_in_s - 0.01, d) == doctest::Approx(1.0));
}

TEST_CASE("linear easing") {
    BreathPattern p{2.0, 0.0, 2.0, 0.0, 1.0, Easing::linear};
    CHECK(breath_value(0.5, p) == doctest::Approx(0.25));
    CHECK(breath_value(3.0, p) == doctest::Approx(0.5));
}

TEST_CASE("breath_at_phase wraps") {
    const auto p = patterns::slow();
    CHECK(breath_at_phase(0.4, p) == doctest::Approx(breath_value(4.0, p)));
    CHECK(breath_at_phase(2.4, p) == doctest::Approx(breath_value(4.0, p)));
}

TEST_CASE("named pattern periods by autocorrelation") {
    const double dt = 0.01;
    auto period_of = [&](const BreathPattern& p, double span) {
        std::vector<double> v;
        for (int i = 0; i * dt < span; ++i) v.push_back(breath_value(i * dt, p));
        return analysis::autocorr_period(v, dt, 0.2, span / 2);
    };
    auto slow = period_of(patterns::slow(), 100.0);
    REQUIRE(slow);
    CHECK(std::abs(*slow - 10.0) <= dt);
    auto bunny = period_of(patterns::bunny(), 8.0);
    REQUIRE(bunny);
    CHECK(std::abs(*bunny - 0.8) <= dt);
}

TEST_CASE("invalid patterns") {
    BreathPattern p;
    p.inhale_s = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.amplitude = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("pulse_value examples") {
    const auto env = PulseEnvelope::lub_dub();
    CHECK(env.period_s == 1.0);
    CHECK(pulse_value(0.04, env) == 1.0);
    CHECK(pulse_value(0.10, env) == 0.0);
    CHECK(pulse_value(0.16, env) == 0.7);
    CHECK(pulse_value(1.16, env) == 0.7);
    CHECK(PulseEnvelope::lub_dub(120).period_s == 0.5);

    PulseEnvelope overlap{{{0.0, 1.0, 0.2}, {0.1, 1.0, 0.1}}, 1.0};
    CHECK_THROWS_AS(overlap.validate(), ConfigError);
}

TEST_CASE("purr gate and carrier") {
    PurrSpec spec;
    CHECK(purr_value(7.5, spec) == 0.0);
    // Plateau of the first burst spans [1.25, 3.75] s; the carrier peaks at t = 1/80 + k/20.
    CHECK(purr_value(2.0125, spec) == doctest::Approx(1.0));
    for (double t = 0.0; t < 30.0; t += 0.001) {
        const double v = purr_value(t, spec);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
    }
}

TEST_CASE("purr gate rising edges every burst period") {
    PurrSpec spec;
    const double dt = 0.001;
    std::vector<double> gate;
    for (int i = 0; i * dt < 30.0; ++i) gate.push_back(purr_gate(i * dt, spec));
    const auto edges = analysis::rising_edges(gate, dt, 0.0, 0.0);
    // The gate leaves zero right after each burst start.
    REQUIRE(edges.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(edges[k] - 10.0 * k) <= 0.0011);
}

TEST_CASE("purr spectral peak sits on the carrier") {
    PurrSpec spec;
    const double dt = 0.001;
    std::vector<double> v;
    for (int i = 0; i * dt < 10.0; ++i) v.push_back(purr_value(i * dt, spec));
    CHECK(std::abs(analysis::dominant_frequency(v, dt, 5.0, 100.0, 0.05) - 20.0) <= 1.0);
}

TEST_CASE("ramp_color") {
    ColorRamp r;
    CHECK(ramp_color(0.0, r) == Rgb{139, 0, 0});
    CHECK(ramp_color(1.0, r) == Rgb{255, 214, 70});
    CHECK(ramp_color(0.5, r) == Rgb{197, 107, 35});
    CHECK(ramp_color(-1.0, r) == Rgb{139, 0, 0});
    CHECK(ramp_color(2.0, r) == Rgb{255, 214, 70});
}
