#pragma once

#include "lantern/config.hpp"
#include "lantern/devicesim.hpp"
#include "lantern/engine.hpp"
#include "lantern/protocol.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace lantern::service {

class ServiceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TickResult {
    engine::ActuatorFrame frame;
    devicesim::DeviceState device;
    std::vector<engine::Notice> notices;
};

/// Runs the engine and the simulated device on a dedicated control thread.
///
/// Other threads talk to the engine only through submit(); queued work runs
/// on the control thread at the next tick boundary. Observers run on the
/// control thread after every tick and must not block.
class EngineLoop {
public:
    using Observer = std::function<void(const TickResult&)>;
    using PreTick = std::function<void(engine::Engine&, std::int64_t next_t_ms)>;

    EngineLoop(engine::Engine engine, devicesim::Device device, double accel);
    ~EngineLoop();
    EngineLoop(const EngineLoop&) = delete;
    EngineLoop& operator=(const EngineLoop&) = delete;

    /// Observers and the pre-tick hook must be installed before start().
    void add_observer(Observer obs);
    void set_pre_tick(PreTick hook);

    void start();
    void stop();
    bool running() const { return running_; }

    template <class F>
    auto submit(F&& fn) -> std::future<std::invoke_result_t<F&, engine::Engine&>> {
        using R = std::invoke_result_t<F&, engine::Engine&>;
        auto task = std::make_shared<std::packaged_task<R(engine::Engine&)>>(std::forward<F>(fn));
        auto fut = task->get_future();
        {
            std::lock_guard lock(mu_);
            requests_.push_back([task](engine::Engine& e) { (*task)(e); });
        }
        return fut;
    }

    std::int64_t ticks() const { return ticks_; }
    int tick_ms() const { return tick_ms_; }

private:
    void run();

    engine::Engine engine_;
    devicesim::Device device_;
    double accel_;
    int tick_ms_;
    std::vector<Observer> observers_;
    PreTick pre_tick_;
    std::mutex mu_;
    std::deque<std::function<void(engine::Engine&)>> requests_;
    std::atomic<bool> running_{false};
    std::atomic<std::int64_t> ticks_{0};
    std::thread thread_;
};

/// Serves the protocol on a raw TCP port (JSON lines) and on a WebSocket
/// port (one JSON message per text frame).
class Server {
public:
    /// Binds both ports; throws ServiceError if either is unavailable.
    /// Port 0 picks an ephemeral port.
    Server(EngineLoop& loop, config::ServiceConfig cfg);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    void start();
    void stop();

    int control_port() const { return control_port_; }
    int ws_port() const { return ws_port_; }
    std::size_t client_count() const;
    std::uint64_t dropped_telemetry() const { return dropped_; }

private:
    class Session;

    void accept_loop(int listen_fd, bool websocket);
    void broadcast(const TickResult& tick);
    void reap();

    EngineLoop& loop_;
    config::ServiceConfig cfg_;
    int control_fd_ = -1;
    int ws_fd_ = -1;
    int control_port_ = 0;
    int ws_port_ = 0;
    std::atomic<bool> running_{false};
    std::atomic<std::uint64_t> dropped_{0};
    std::atomic<std::int64_t> frame_counter_{0};
    std::vector<std::thread> acceptors_;
    mutable std::mutex sessions_mu_;
    std::vector<std::shared_ptr<Session>> sessions_;
};

/// Blocking JSON-lines client for the control port.
class LineClient {
public:
    LineClient(const std::string& host, int port);
    ~LineClient();
    LineClient(const LineClient&) = delete;
    LineClient& operator=(const LineClient&) = delete;

    void send(const protocol::Message& msg);
    void send_raw(const std::string& line);
    /// Next complete line decoded, or nothing on timeout / closed connection.
    std::optional<protocol::Message> receive(std::chrono::milliseconds timeout);
    /// Reads until a message with kind ack/error and the given id arrives.
    std::optional<protocol::Message> await_reply(std::int64_t id, std::chrono::milliseconds timeout);
    void close();

private:
    int fd_ = -1;
    std::string buffer_;
};

struct Endpoint {
    std::string host = "127.0.0.1";
    int port = 7421;
};

/// "host:port", ":port" or "port".
Endpoint parse_endpoint(const std::string& text);

/// Value of the Sec-WebSocket-Accept header for a client key.
std::string websocket_accept_key(const std::string& client_key);

}  // namespace lantern::service
