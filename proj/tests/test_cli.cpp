#include "lantern/wav.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace lantern;

namespace {

struct Result {
    int code = -1;
    std::string out;  // stdout and stderr together
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(LANTERN_BIN) + " " + args + " 2>&1";
    Result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, p)) r.out += buf;
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lantern-cli-tests";
    fs::create_directories(dir);
    return dir / name;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("run slow for 30 s writes 3000 rows") {
    const auto out = scratch("slow.csv");
    const auto r = cli("run --behavior slow --duration 30 --quiet --out " + out.string());
    CHECK(r.code == 0);
    CHECK(line_count(out) == 3001);
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t_ms,compression,height_mm,bulge_mm,vib,led0_r,led0_g,led0_b,active");
}

TEST_CASE("unknown behavior exits 2 and lists the registry") {
    const auto r = cli("run --behavior nope");
    CHECK(r.code == 2);
    CHECK(r.out.find("slow, bunny, dragon, heartbeat, postop, softtoy, circadian, speaker") != std::string::npos);
}

TEST_CASE("bad parameters exit 2") {
    CHECK(cli("run --behavior slow --params amplitude=lots").code == 2);
    CHECK(cli("run --behavior slow --params bogus=1 --duration 1").code == 2);
}

TEST_CASE("validate names the offending field") {
    const auto cfg = scratch("bad.toml");
    std::ofstream(cfg) << "[device.shell]\nstrip_length_mm = -150\n";
    auto r = cli("validate " + cfg.string());
    CHECK(r.code == 2);
    CHECK(r.out.find("device.shell.strip_length_mm") != std::string::npos);

    const auto good = scratch("good.toml");
    std::ofstream(good) << "[engine]\ntick_ms = 10\n[behavior.slow]\namplitude = 0.5\n";
    r = cli("validate " + good.string());
    CHECK(r.code == 0);
}

TEST_CASE("LANTERN_CONFIG is the fallback config") {
    const auto cfg = scratch("tick5.toml");
    std::ofstream(cfg) << "[engine]\ntick_ms = 5\n";
    const auto out = scratch("tick5.csv");
    const std::string env = "LANTERN_CONFIG=" + cfg.string() + " ";
    const std::string cmd = env + LANTERN_BIN + " run --behavior slow --duration 1 --quiet --out " + out.string();
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(line_count(out) == 201);
}

TEST_CASE("flip trace during the alarm dismisses the lamp") {
    perception::SensorTrace trace;
    trace.imu = testing::flip_trace(1.0, 1.0, 1.0);
    const auto path = scratch("flip.trace");
    {
        std::ofstream f(path);
        perception::write_trace(f, trace);
    }
    const auto out = scratch("circadian.csv");
    const auto r = cli("run --behavior circadian --params alarm_s=20 ramp_s=20 --sensors " + path.string() +
                           " --sensors-at 25 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("phase circadian ALARM") != std::string::npos);
    CHECK(r.out.find("phase circadian DISMISSED") != std::string::npos);
    CHECK(r.out.find("gesture - Flip") != std::string::npos);
}

TEST_CASE("same flags and seed give identical files") {
    const auto a = scratch("det_a.csv");
    const auto b = scratch("det_b.csv");
    CHECK(cli("run --behavior softtoy --duration 15 --seed 3 --quiet --out " + a.string()).code == 0);
    CHECK(cli("run --behavior softtoy --duration 15 --seed 3 --quiet --out " + b.string()).code == 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(!sa.str().empty());
}

TEST_CASE("analyze reports maxima of a post-op run") {
    const auto out = scratch("postop.csv");
    REQUIRE(cli("run --behavior postop --reps 1 --quiet --out " + out.string()).code == 0);
    const auto r = cli("analyze " + out.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("\"maxima\": 4") != std::string::npos);
}

TEST_CASE("speaker needs audio and accepts a wav") {
    CHECK(cli("run --behavior speaker --duration 1").code == 2);
    const auto wav = scratch("clicks.wav");
    wav::save(wav.string(), testing::click_track(120.0, 10.0).clip);
    const auto out = scratch("speaker.csv");
    const auto r = cli("run --behavior speaker --audio " + wav.string() + " --quiet --out " + out.string());
    CHECK(r.code == 0);
    CHECK(line_count(out) > 1000);
}
