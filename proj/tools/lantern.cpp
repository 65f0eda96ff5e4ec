// lantern: headless driver for the behavior engine and device simulator.

#include "lantern/analysis.hpp"
#include "lantern/config.hpp"
#include "lantern/protocol.hpp"
#include "lantern/runner.hpp"
#include "lantern/service.hpp"
#include "lantern/telemetry.hpp"
#include "lantern/wav.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace lantern;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

Params parse_params(const std::vector<std::string>& items) {
    Params out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--params expects key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            std::size_t used = 0;
            out[key] = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' is not a number: '" + value + "'");
        }
    }
    return out;
}

config::StackConfig load_stack(const std::string& path) {
    std::string file = path;
    if (file.empty())
        if (const char* env = std::getenv("LANTERN_CONFIG"); env && *env) file = env;
    return file.empty() ? config::StackConfig{} : config::load_config(file);
}

struct RunArgs {
    std::string behavior;
    std::vector<std::string> params;
    double duration = 0.0;
    int reps = 0;
    double accel = -1.0;
    std::int64_t seed = -1;
    std::string config;
    std::string out;
    std::string sensors;
    double sensors_at = 0.0;
    std::string endpoint;
    std::string audio;
    bool serve = false;
    bool quiet = false;
    int port = 0;
};

std::unique_ptr<std::ostream, void (*)(std::ostream*)> open_out(const std::string& path) {
    if (path.empty() || path == "-") return {&std::cout, [](std::ostream*) {}};
    auto* f = new std::ofstream(path);
    if (!*f) {
        delete f;
        throw ConfigError("cannot write " + path);
    }
    return {f, [](std::ostream* p) { delete p; }};
}

telemetry::Row row_from_telemetry(const protocol::Message& m) {
    const auto& p = m.payload;
    telemetry::Row r;
    r.t_ms = p.at("t_ms").get<std::int64_t>();
    r.compression = p.at("compression").get<double>();
    r.height_mm = p.at("height_mm").get<double>();
    r.bulge_mm = p.at("bulge_mm").get<double>();
    r.vib = p.at("vib").get<double>();
    const auto& led = p.at("led0");
    r.led0 = {led.at(0).get<std::uint8_t>(), led.at(1).get<std::uint8_t>(), led.at(2).get<std::uint8_t>()};
    r.active = p.at("active").is_null() ? "none" : p.at("active").get<std::string>();
    return r;
}

/// Drives a behavior on a remote service and records its full-rate telemetry.
int run_remote(const RunArgs& a, const Params& params) {
    const auto ep = service::parse_endpoint(a.endpoint);
    service::LineClient client(ep.host, ep.port);
    const auto timeout = std::chrono::seconds(5);

    std::int64_t next_id = 1;
    auto request = [&](const std::string& kind, nlohmann::json payload) {
        const auto id = next_id++;
        client.send({protocol::kVersion, id, kind, std::move(payload)});
        auto reply = client.await_reply(id, timeout);
        if (!reply) throw service::ServiceError("no reply to " + kind);
        if (reply->kind == "error")
            throw service::ServiceError(kind + " failed: " + reply->payload.value("message", std::string()));
        return *reply;
    };

    request("hello", nlohmann::json::object());
    request("subscribe", {{"every", 1}});
    nlohmann::json p = {{"behavior", a.behavior}, {"params", nlohmann::json::object()}};
    for (const auto& [k, v] : params) p["params"][k] = v;
    request("start", p);

    auto out = open_out(a.out);
    telemetry::write_header(*out);
    std::optional<std::int64_t> first_ms;
    const std::int64_t span_ms = a.duration > 0 ? static_cast<std::int64_t>(std::llround(a.duration * 1000)) : -1;
    while (!g_interrupted) {
        auto m = client.receive(std::chrono::seconds(30));
        if (!m) throw service::ServiceError("telemetry stream ended");
        if (m->kind == "telemetry") {
            const auto row = row_from_telemetry(*m);
            if (!first_ms) first_ms = row.t_ms;
            telemetry::write_row(*out, row);
            if (span_ms > 0 && row.t_ms - *first_ms + 1 >= span_ms) break;
        } else if (m->kind == "event" && span_ms < 0 && m->payload.value("type", "") == "released" &&
                   m->payload.value("behavior", nlohmann::json()) == a.behavior) {
            break;
        }
    }
    if (span_ms > 0 || g_interrupted) {
        try {
            request("stop", {{"behavior", a.behavior}});
        } catch (const service::ServiceError&) {
            // Already finished on its own.
        }
    }
    return 0;
}

/// Runs the engine behind the network service until interrupted or the duration elapses.
int run_served(const RunArgs& a, config::StackConfig cfg, const Params& params, std::optional<behaviors::AudioClip> audio) {
    if (a.port > 0) {
        cfg.service.control_port = a.port;
        cfg.service.ws_port = a.port + 1;
    }
    const double accel = a.accel >= 0 ? a.accel : cfg.service.accel;
    engine::Engine eng(cfg.engine, runner::registry(cfg, std::move(audio)));
    if (!a.behavior.empty())
        if (auto r = eng.start(a.behavior, params); !r.ok()) throw ConfigError(r.message);

    service::EngineLoop loop(std::move(eng), devicesim::Device(cfg.device), accel);
    std::unique_ptr<std::ostream, void (*)(std::ostream*)> out{nullptr, [](std::ostream*) {}};
    if (!a.out.empty()) {
        out = open_out(a.out);
        telemetry::write_header(*out);
        loop.add_observer([&](const service::TickResult& t) { telemetry::write_row(*out, telemetry::make_row(t.frame, t.device)); });
    }
    std::optional<devicesim::SensorReplay> replay;
    if (!a.sensors.empty()) {
        replay.emplace(perception::load_trace(a.sensors), cfg.gestures, std::llround(a.sensors_at * 1000));
        loop.set_pre_tick([&](engine::Engine& e, std::int64_t next) { devicesim::deliver(e, replay->advance_to(next)); });
    }

    service::Server server(loop, cfg.service);
    server.start();
    loop.start();
    std::cerr << "serving control on " << cfg.service.host << ":" << server.control_port() << ", websocket on "
              << server.ws_port() << " (accel " << accel << ")\n";

    const std::int64_t limit_ticks =
        a.duration > 0 ? static_cast<std::int64_t>(std::llround(a.duration * 1000.0 / cfg.engine.tick_ms)) : -1;
    while (!g_interrupted && (limit_ticks < 0 || loop.ticks() < limit_ticks))
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    server.stop();
    loop.stop();
    return 0;
}

int cmd_run(const RunArgs& a) {
    auto cfg = load_stack(a.config);
    if (a.seed >= 0) cfg.device.rng_seed = static_cast<std::uint64_t>(a.seed);
    auto params = parse_params(a.params);
    if (a.reps > 0) params["reps"] = a.reps;

    std::optional<behaviors::AudioClip> audio;
    if (!a.audio.empty()) audio = wav::load(a.audio);

    if (!a.endpoint.empty()) return run_remote(a, params);
    if (a.serve) return run_served(a, cfg, params, std::move(audio));

    runner::RunOptions opts;
    opts.behavior = a.behavior;
    opts.params = params;
    if (a.duration > 0) opts.duration_s = a.duration;
    opts.accel = a.accel >= 0 ? a.accel : 0.0;
    opts.audio = std::move(audio);
    if (!a.sensors.empty()) {
        opts.sensors = perception::load_trace(a.sensors);
        opts.sensors_at_s = a.sensors_at;
    }
    auto out = open_out(a.out);
    const auto result = runner::run(cfg, opts, out.get(), false);
    out->flush();
    if (!a.quiet) {
        for (const auto& n : result.notices) {
            char stamp[32];
            std::snprintf(stamp, sizeof stamp, "%.3f", n.t_ms / 1000.0);
            std::cerr << "[" << stamp << "] " << engine::to_string(n.kind) << " "
                      << (n.behavior.empty() ? "-" : n.behavior) << (n.detail.empty() ? "" : " " + n.detail) << "\n";
        }
    }
    return 0;
}

int cmd_validate(const std::string& path) {
    const auto cfg = config::load_config(path);
    std::cout << path << ": ok (shell " << cfg.device.shell.strip_length_mm << " mm, tick " << cfg.engine.tick_ms
              << " ms, ports " << cfg.service.control_port << "/" << cfg.service.ws_port << ")\n";
    return 0;
}

int cmd_analyze(const std::string& path, double prominence) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    const auto rows = telemetry::read_csv(in);
    std::cout << analysis::to_json(analysis::analyze(rows, prominence)) << "\n";
    return 0;
}

/// Interactive line session: `start slow`, `stop slow`, `list`, `set slow amplitude 0.5`,
/// `event Flip`, `subscribe 5`, or a raw JSON message.
int cmd_connect(const std::string& endpoint, bool quiet_telemetry) {
    const auto ep = service::parse_endpoint(endpoint);
    service::LineClient client(ep.host, ep.port);
    std::atomic<bool> done{false};
    std::mutex out_mu;
    std::int64_t next_id = 1;

    std::thread printer([&] {
        while (!done) {
            auto m = client.receive(std::chrono::milliseconds(100));
            if (!m) continue;
            if (quiet_telemetry && m->kind == "telemetry") continue;
            std::lock_guard lock(out_mu);
            std::cout << protocol::encode(*m) << std::flush;
        }
    });

    std::string line;
    while (!g_interrupted && std::getline(std::cin, line)) {
        std::istringstream words(line);
        std::string verb;
        words >> verb;
        if (verb.empty()) continue;
        if (verb == "quit" || verb == "exit") break;
        protocol::Message m{protocol::kVersion, next_id++, verb, nlohmann::json::object()};
        std::string a, b;
        double v = 0;
        if (verb == "start" || verb == "stop") {
            words >> a;
            m.payload["behavior"] = a;
            if (words >> b && b == "preempt") m.payload["preempt"] = true;
        } else if (verb == "set") {
            words >> a >> b >> v;
            m.kind = "set_param";
            m.payload = {{"behavior", a}, {"key", b}, {"value", v}};
        } else if (verb == "subscribe") {
            int every = 5;
            words >> every;
            m.payload["every"] = every;
        } else if (verb == "event") {
            words >> a;
            m.payload["type"] = a;
        } else if (verb[0] == '{') {
            client.send_raw(line);
            continue;
        }
        client.send(m);
    }
    done = true;
    printer.join();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    CLI::App app{"Lantern behavior engine and device simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a behavior on the simulator (or a remote service) and record telemetry");
    run_cmd->add_option("--behavior", run.behavior, "Behavior id")->required();
    run_cmd->add_option("--params", run.params, "Behavior parameters as key=value")->expected(0, -1);
    run_cmd->add_option("--duration", run.duration, "Simulated seconds to run (default: until the behavior ends)");
    run_cmd->add_option("--reps", run.reps, "Shorthand for --params reps=N");
    run_cmd->add_option("--accel", run.accel, "Simulated seconds per wall second (0 = unpaced)");
    run_cmd->add_option("--seed", run.seed, "Simulator RNG seed");
    run_cmd->add_option("--config", run.config, "Config file (falls back to $LANTERN_CONFIG)");
    run_cmd->add_option("--out", run.out, "Telemetry CSV path (default stdout)");
    run_cmd->add_option("--sensors", run.sensors, "Sensor trace to replay through gesture detection");
    run_cmd->add_option("--sensors-at", run.sensors_at, "Simulated second at which the sensor trace starts");
    run_cmd->add_option("--endpoint", run.endpoint, "Run on a remote service at host:port instead");
    run_cmd->add_option("--audio", run.audio, "WAV file for the speaker behavior");
    run_cmd->add_flag("--quiet", run.quiet, "Do not log phase changes and gestures to stderr");
    run_cmd->add_flag("--serve", run.serve, "Expose the engine over the network while running");
    run_cmd->add_option("--port", run.port, "Control port for --serve (websocket on port+1)");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
    validate_cmd->add_option("file", validate_path)->required();

    std::string analyze_path;
    double prominence = 0.05;
    auto* analyze_cmd = app.add_subcommand("analyze", "Report periods, extremes and pulse spacing of a telemetry CSV");
    analyze_cmd->add_option("csv", analyze_path)->required();
    analyze_cmd->add_option("--prominence", prominence, "Minimum compression swing counted as a breath");

    std::string endpoint = "127.0.0.1:7421";
    bool quiet = false;
    auto* connect_cmd = app.add_subcommand("connect", "Interactive session with a running service");
    connect_cmd->add_option("--endpoint", endpoint);
    connect_cmd->add_flag("--quiet-telemetry", quiet, "Hide telemetry lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*validate_cmd) return cmd_validate(validate_path);
        if (*analyze_cmd) return cmd_analyze(analyze_path, prominence);
        if (*connect_cmd) return cmd_connect(endpoint, quiet);
    } catch (const ConfigError& e) {
        std::cerr << "lantern: " << e.what() << "\n";
        return kExitUsage;
    } catch (const StreamError& e) {
        std::cerr << "lantern: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "lantern: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
