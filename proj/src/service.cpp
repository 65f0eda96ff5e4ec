#include "lantern/service.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace lantern::service {

using protocol::Message;
using nlohmann::json;

// EngineLoop ------------------------------------------------------------------

EngineLoop::EngineLoop(engine::Engine engine, devicesim::Device device, double accel)
    : engine_(std::move(engine)), device_(std::move(device)), accel_(accel), tick_ms_(engine_.config().tick_ms) {
    if (!(accel_ >= 0.0)) throw ConfigError("accel must be >= 0");
}

EngineLoop::~EngineLoop() { stop(); }

void EngineLoop::add_observer(Observer obs) { observers_.push_back(std::move(obs)); }
void EngineLoop::set_pre_tick(PreTick hook) { pre_tick_ = std::move(hook); }

void EngineLoop::start() {
    if (running_.exchange(true)) return;
    thread_ = std::thread([this] { run(); });
}

void EngineLoop::stop() {
    if (!running_.exchange(false)) return;
    if (thread_.joinable()) thread_.join();
    // Answer anything still queued so no caller waits forever.
    std::deque<std::function<void(engine::Engine&)>> leftover;
    {
        std::lock_guard lock(mu_);
        leftover.swap(requests_);
    }
    for (auto& r : leftover) r(engine_);
}

void EngineLoop::run() {
    using clock = std::chrono::steady_clock;
    const auto period = accel_ > 0.0 ? std::chrono::duration_cast<clock::duration>(
                                           std::chrono::duration<double, std::milli>(tick_ms_ / accel_))
                                     : clock::duration::zero();
    auto deadline = clock::now();

    while (running_) {
        std::deque<std::function<void(engine::Engine&)>> batch;
        {
            std::lock_guard lock(mu_);
            batch.swap(requests_);
        }
        for (auto& r : batch) r(engine_);

        if (pre_tick_) pre_tick_(engine_, engine_.clock_ms() + tick_ms_);
        TickResult result;
        result.frame = engine_.tick();
        result.device = device_.apply(result.frame);
        result.notices = engine_.take_notices();
        ++ticks_;
        for (auto& obs : observers_) obs(result);

        if (period > clock::duration::zero()) {
            deadline += period;
            const auto now = clock::now();
            if (deadline < now - std::chrono::seconds(1)) deadline = now;  // fell far behind; don't burst
            std::this_thread::sleep_until(deadline);
        } else {
            std::this_thread::yield();
        }
    }
}

// Socket helpers ----------------------------------------------------------------

namespace {

bool send_all(int fd, const void* data, std::size_t size) {
    const char* p = static_cast<const char*>(data);
    while (size > 0) {
        const ssize_t n = ::send(fd, p, size, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        p += n;
        size -= static_cast<std::size_t>(n);
    }
    return true;
}

int listen_on(const std::string& host, int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw ServiceError(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw ServiceError("bad listen address '" + host + "'");
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd, 16) < 0) {
        const std::string err = std::strerror(errno);
        ::close(fd);
        throw ServiceError("cannot listen on " + host + ":" + std::to_string(port) + ": " + err);
    }
    return fd;
}

int bound_port(int fd) {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string websocket_accept_key(const std::string& client_key) {
    const std::string joined = client_key + "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";
    unsigned char digest[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(joined.data()), joined.size(), digest);
    unsigned char out[64];
    const int n = EVP_EncodeBlock(out, digest, SHA_DIGEST_LENGTH);
    return std::string(reinterpret_cast<char*>(out), static_cast<std::size_t>(n));
}

Endpoint parse_endpoint(const std::string& text) {
    Endpoint ep;
    const auto colon = text.rfind(':');
    std::string port = text;
    if (colon != std::string::npos) {
        if (colon > 0) ep.host = text.substr(0, colon);
        port = text.substr(colon + 1);
    }
    try {
        std::size_t used = 0;
        ep.port = std::stoi(port, &used);
        if (used != port.size() || ep.port <= 0 || ep.port > 65535) throw std::invalid_argument(port);
    } catch (const std::exception&) {
        throw ConfigError("bad endpoint '" + text + "' (expected host:port)");
    }
    if (ep.host == "localhost") ep.host = "127.0.0.1";
    return ep;
}

// Session -------------------------------------------------------------------------

class Server::Session {
public:
    Session(Server& server, int fd, bool websocket) : server_(server), fd_(fd), ws_(websocket) {}

    ~Session() {
        close();
        join();
        ::close(fd_);
    }

    void start() {
        reader_ = std::thread([this] { read_loop(); });
        writer_ = std::thread([this] { write_loop(); });
    }

    void close() {
        if (closed_.exchange(true)) return;
        ::shutdown(fd_, SHUT_RDWR);
        cv_.notify_all();
    }

    void join() {
        if (reader_.joinable()) reader_.join();
        if (writer_.joinable()) writer_.join();
    }

    bool closed() const { return closed_; }
    int every() const { return every_; }

    void push_control(std::string msg) {
        {
            std::lock_guard lock(mu_);
            control_.push_back(std::move(msg));
        }
        cv_.notify_one();
    }

    /// Bounded; drops the oldest frame when full.
    void push_telemetry(const std::string& msg) {
        {
            std::lock_guard lock(mu_);
            if (telemetry_.size() >= static_cast<std::size_t>(server_.cfg_.queue_frames)) {
                telemetry_.pop_front();
                ++server_.dropped_;
            }
            telemetry_.push_back(msg);
        }
        cv_.notify_one();
    }

private:
    bool fill(std::size_t need) {
        char buf[4096];
        while (inbuf_.size() < need) {
            const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) return false;
            inbuf_.append(buf, static_cast<std::size_t>(n));
        }
        return true;
    }

    bool read_line(std::string& line) {
        char buf[4096];
        for (;;) {
            if (auto nl = inbuf_.find('\n'); nl != std::string::npos) {
                line = inbuf_.substr(0, nl);
                inbuf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
            if (inbuf_.size() > (1u << 20)) return false;
            const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) return false;
            inbuf_.append(buf, static_cast<std::size_t>(n));
        }
    }

    bool handshake() {
        std::string request;
        std::string line;
        std::string key;
        while (read_line(line)) {
            if (line.empty()) break;
            const auto colon = line.find(':');
            if (colon != std::string::npos && lower(line.substr(0, colon)) == "sec-websocket-key") {
                key = line.substr(colon + 1);
                key.erase(0, key.find_first_not_of(' '));
                key.erase(key.find_last_not_of(" \r") + 1);
            }
        }
        if (key.empty()) {
            const std::string bad = "HTTP/1.1 400 Bad Request\r\nContent-Length: 0\r\n\r\n";
            send_all(fd_, bad.data(), bad.size());
            return false;
        }
        const std::string reply = "HTTP/1.1 101 Switching Protocols\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                                  "Sec-WebSocket-Accept: " +
                                  websocket_accept_key(key) + "\r\n\r\n";
        std::lock_guard lock(write_mu_);
        return send_all(fd_, reply.data(), reply.size());
    }

    bool write_frame(std::uint8_t opcode, const std::string& payload) {
        std::string frame;
        frame.push_back(static_cast<char>(0x80 | opcode));
        const auto n = payload.size();
        if (n < 126) {
            frame.push_back(static_cast<char>(n));
        } else if (n <= 0xFFFF) {
            frame.push_back(126);
            frame.push_back(static_cast<char>((n >> 8) & 0xFF));
            frame.push_back(static_cast<char>(n & 0xFF));
        } else {
            frame.push_back(127);
            for (int i = 7; i >= 0; --i) frame.push_back(static_cast<char>((static_cast<std::uint64_t>(n) >> (8 * i)) & 0xFF));
        }
        frame += payload;
        std::lock_guard lock(write_mu_);
        return send_all(fd_, frame.data(), frame.size());
    }

    /// Next text message from a WebSocket peer; answers pings, stops on close.
    bool read_ws_message(std::string& out) {
        std::string message;
        for (;;) {
            if (!fill(2)) return false;
            const auto b0 = static_cast<std::uint8_t>(inbuf_[0]);
            const auto b1 = static_cast<std::uint8_t>(inbuf_[1]);
            const bool fin = b0 & 0x80;
            const std::uint8_t opcode = b0 & 0x0F;
            const bool masked = b1 & 0x80;
            std::uint64_t len = b1 & 0x7F;
            std::size_t header = 2;
            if (len == 126) {
                if (!fill(4)) return false;
                len = (std::uint64_t(std::uint8_t(inbuf_[2])) << 8) | std::uint8_t(inbuf_[3]);
                header = 4;
            } else if (len == 127) {
                if (!fill(10)) return false;
                len = 0;
                for (int i = 0; i < 8; ++i) len = (len << 8) | std::uint8_t(inbuf_[2 + i]);
                header = 10;
            }
            if (len > (1u << 20)) return false;
            const std::size_t mask_at = header;
            if (masked) header += 4;
            if (!fill(header + len)) return false;
            std::string payload = inbuf_.substr(header, len);
            if (masked)
                for (std::size_t i = 0; i < payload.size(); ++i) payload[i] ^= inbuf_[mask_at + (i % 4)];
            inbuf_.erase(0, header + len);

            switch (opcode) {
                case 0x0:
                case 0x1:
                case 0x2:
                    message += payload;
                    if (fin) {
                        out = std::move(message);
                        return true;
                    }
                    break;
                case 0x8:
                    write_frame(0x8, payload.substr(0, 2));
                    return false;
                case 0x9:
                    write_frame(0xA, payload);
                    break;
                default:
                    break;
            }
        }
    }

    bool write_message(const std::string& encoded) {
        if (!ws_) {
            std::lock_guard lock(write_mu_);
            return send_all(fd_, encoded.data(), encoded.size());
        }
        std::string text = encoded;
        if (!text.empty() && text.back() == '\n') text.pop_back();
        return write_frame(0x1, text);
    }

    void reply(const Message& m) { push_control(protocol::encode(m)); }

    void read_loop() {
        if (ws_ && !handshake()) {
            close();
            return;
        }
        std::string line;
        while (!closed_) {
            const bool ok = ws_ ? read_ws_message(line) : read_line(line);
            if (!ok) break;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            handle(line);
        }
        close();
    }

    void write_loop() {
        while (true) {
            std::string next;
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [&] { return closed_ || !control_.empty() || !telemetry_.empty(); });
                if (closed_) return;
                if (!control_.empty()) {
                    next = std::move(control_.front());
                    control_.pop_front();
                } else {
                    next = std::move(telemetry_.front());
                    telemetry_.pop_front();
                }
            }
            if (!write_message(next)) {
                close();
                return;
            }
        }
    }

    template <class F>
    auto on_engine(F&& fn) {
        auto fut = server_.loop_.submit(std::forward<F>(fn));
        if (fut.wait_for(std::chrono::seconds(5)) != std::future_status::ready)
            throw ServiceError("engine did not respond");
        return fut.get();
    }

    static json reply_payload(const engine::Reply& r) {
        json p = {{"status", engine::to_string(r.status)}};
        if (!r.message.empty()) p["message"] = r.message;
        return p;
    }

    void answer(std::int64_t id, const engine::Reply& r) {
        if (r.ok())
            reply(protocol::make_ack(id, reply_payload(r)));
        else
            reply(protocol::make_error(id, engine::to_string(r.status), r.message));
    }

    static std::string required_string(const json& p, const char* key) {
        auto it = p.find(key);
        if (it == p.end() || !it->is_string()) throw std::invalid_argument(std::string("payload needs string '") + key + "'");
        return it->get<std::string>();
    }

    void handle(const std::string& line) {
        Message m;
        try {
            m = protocol::decode(line);
        } catch (const protocol::ProtocolError& e) {
            // Echo the id when one can be read, so the client can still correlate.
            std::int64_t id = 0;
            const auto j = json::parse(line, nullptr, false);
            if (j.is_object())
                if (auto it = j.find("id"); it != j.end() && it->is_number_integer() && it->get<std::int64_t>() > 0)
                    id = it->get<std::int64_t>();
            reply(protocol::make_error(id, protocol::to_string(e.code()), e.what()));
            return;
        }

        try {
            dispatch(m);
        } catch (const std::invalid_argument& e) {
            reply(protocol::make_error(m.id, "bad_payload", e.what()));
        } catch (const ServiceError& e) {
            reply(protocol::make_error(m.id, "internal", e.what()));
        }
    }

    void dispatch(const Message& m) {
        const json& p = m.payload;
        if (m.kind == "hello") {
            auto ids = on_engine([](engine::Engine& e) {
                std::vector<std::string> out;
                for (const auto& b : e.list()) out.push_back(b.id);
                return std::make_pair(out, e.config().tick_ms);
            });
            reply(protocol::make_ack(m.id, {{"server", "lantern"},
                                            {"protocol", protocol::kVersion},
                                            {"tick_ms", ids.second},
                                            {"behaviors", ids.first},
                                            {"transport", ws_ ? "websocket" : "tcp"}}));
        } else if (m.kind == "list") {
            auto list = on_engine([](engine::Engine& e) { return e.list(); });
            json arr = json::array();
            for (const auto& b : list) {
                json channels = json::array();
                for (auto c : kAllChannels)
                    if (b.channels.contains(c)) channels.push_back(to_string(c));
                arr.push_back({{"id", b.id},
                               {"channels", channels},
                               {"params", b.params},
                               {"active", b.active},
                               {"stopping", b.stopping},
                               {"pending", b.pending},
                               {"phase", b.phase.empty() ? json(nullptr) : json(b.phase)}});
            }
            reply(protocol::make_ack(m.id, {{"behaviors", arr}}));
        } else if (m.kind == "start") {
            const auto id = required_string(p, "behavior");
            Params params;
            if (auto it = p.find("params"); it != p.end()) {
                if (!it->is_object()) throw std::invalid_argument("'params' must be an object of numbers");
                for (const auto& [k, v] : it->items()) {
                    if (!v.is_number()) throw std::invalid_argument("parameter '" + k + "' must be a number");
                    params[k] = v.get<double>();
                }
            }
            bool preempt = false;
            if (auto it = p.find("preempt"); it != p.end()) {
                if (!it->is_boolean()) throw std::invalid_argument("'preempt' must be a boolean");
                preempt = it->get<bool>();
            }
            answer(m.id, on_engine([&](engine::Engine& e) { return e.start(id, params, preempt); }));
        } else if (m.kind == "stop") {
            const auto id = required_string(p, "behavior");
            answer(m.id, on_engine([&](engine::Engine& e) { return e.stop(id); }));
        } else if (m.kind == "set_param") {
            const auto id = required_string(p, "behavior");
            const auto key = required_string(p, "key");
            auto it = p.find("value");
            if (it == p.end() || !it->is_number()) throw std::invalid_argument("payload needs number 'value'");
            const double value = it->get<double>();
            answer(m.id, on_engine([&](engine::Engine& e) { return e.set_param(id, key, value); }));
        } else if (m.kind == "subscribe") {
            int every = server_.cfg_.telemetry_every;
            if (auto it = p.find("every"); it != p.end()) {
                if (!it->is_number_integer() || it->get<int>() < 0)
                    throw std::invalid_argument("'every' must be a non-negative integer");
                every = it->get<int>();
            }
            every_ = every;
            reply(protocol::make_ack(m.id, {{"every", every}}));
        } else if (m.kind == "event" && m.id > 0) {
            const auto type = required_string(p, "type");
            const auto kind = perception::gesture_from_string(type);
            if (!kind) throw std::invalid_argument("unknown event type '" + type + "'");
            std::optional<int> zone;
            if (auto it = p.find("zone"); it != p.end() && it->is_number_integer()) zone = it->get<int>();
            const std::string source = ws_ ? "ws" : "tcp";
            on_engine([&](engine::Engine& e) {
                e.inject(*kind, source, zone);
                return 0;
            });
            reply(protocol::make_ack(m.id, {{"status", "ack"}, {"type", type}}));
        } else {
            reply(protocol::make_error(m.id, "unknown_kind", "'" + m.kind + "' is not a client request"));
        }
    }

    Server& server_;
    int fd_;
    bool ws_;
    std::thread reader_;
    std::thread writer_;
    std::atomic<bool> closed_{false};
    std::atomic<int> every_{0};
    std::mutex mu_;
    std::mutex write_mu_;
    std::condition_variable cv_;
    std::deque<std::string> control_;
    std::deque<std::string> telemetry_;
    std::string inbuf_;
};

// Server ----------------------------------------------------------------------------

Server::Server(EngineLoop& loop, config::ServiceConfig cfg) : loop_(loop), cfg_(std::move(cfg)) {
    control_fd_ = listen_on(cfg_.host, cfg_.control_port);
    try {
        ws_fd_ = listen_on(cfg_.host, cfg_.ws_port);
    } catch (...) {
        ::close(control_fd_);
        throw;
    }
    control_port_ = bound_port(control_fd_);
    ws_port_ = bound_port(ws_fd_);
    loop_.add_observer([this](const TickResult& t) { broadcast(t); });
}

Server::~Server() {
    stop();
    if (control_fd_ >= 0) ::close(control_fd_);
    if (ws_fd_ >= 0) ::close(ws_fd_);
}

void Server::start() {
    if (running_.exchange(true)) return;
    acceptors_.emplace_back([this] { accept_loop(control_fd_, false); });
    acceptors_.emplace_back([this] { accept_loop(ws_fd_, true); });
}

void Server::stop() {
    if (!running_.exchange(false)) return;
    ::shutdown(control_fd_, SHUT_RDWR);
    ::shutdown(ws_fd_, SHUT_RDWR);
    for (auto& t : acceptors_)
        if (t.joinable()) t.join();
    acceptors_.clear();
    std::vector<std::shared_ptr<Session>> sessions;
    {
        std::lock_guard lock(sessions_mu_);
        sessions.swap(sessions_);
    }
    for (auto& s : sessions) s->close();
    sessions.clear();
}

std::size_t Server::client_count() const {
    std::lock_guard lock(sessions_mu_);
    return static_cast<std::size_t>(
        std::count_if(sessions_.begin(), sessions_.end(), [](const auto& s) { return !s->closed(); }));
}

void Server::reap() {
    std::vector<std::shared_ptr<Session>> dead;
    {
        std::lock_guard lock(sessions_mu_);
        auto it = std::stable_partition(sessions_.begin(), sessions_.end(), [](const auto& s) { return !s->closed(); });
        dead.assign(std::make_move_iterator(it), std::make_move_iterator(sessions_.end()));
        sessions_.erase(it, sessions_.end());
    }
    // Sessions join their threads on destruction, outside the lock.
}

void Server::accept_loop(int listen_fd, bool websocket) {
    while (running_) {
        pollfd pfd{listen_fd, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 200);
        if (!running_) break;
        if (ready <= 0) {
            reap();
            continue;
        }
        const int fd = ::accept(listen_fd, nullptr, nullptr);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        auto session = std::make_shared<Session>(*this, fd, websocket);
        session->start();
        {
            std::lock_guard lock(sessions_mu_);
            sessions_.push_back(session);
        }
        reap();
    }
}

void Server::broadcast(const TickResult& tick) {
    const auto n = ++frame_counter_;
    // Held for the whole pass so a session is never destroyed on this thread.
    std::lock_guard lock(sessions_mu_);
    std::string telemetry;
    for (auto& s : sessions_) {
        if (s->closed()) continue;
        const int every = s->every();
        if (every > 0 && n % every == 0) {
            if (telemetry.empty()) telemetry = protocol::encode(protocol::make_telemetry(tick.frame, tick.device));
            s->push_telemetry(telemetry);
        }
        for (const auto& notice : tick.notices) s->push_control(protocol::encode(protocol::make_event(notice)));
    }
}

// LineClient -------------------------------------------------------------------------

LineClient::LineClient(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw ServiceError("cannot resolve " + host);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    const int rc = fd_ < 0 ? -1 : ::connect(fd_, res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc < 0) {
        const std::string err = std::strerror(errno);
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
        throw ServiceError("cannot connect to " + host + ":" + std::to_string(port) + ": " + err);
    }
}

LineClient::~LineClient() { close(); }

void LineClient::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void LineClient::send(const Message& msg) { send_raw(protocol::encode(msg)); }

void LineClient::send_raw(const std::string& line) {
    std::string out = line;
    if (out.empty() || out.back() != '\n') out.push_back('\n');
    if (fd_ < 0 || !send_all(fd_, out.data(), out.size())) throw ServiceError("connection closed");
}

std::optional<Message> LineClient::receive(std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[4096];
    for (;;) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            const std::string line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            try {
                return protocol::decode(line);
            } catch (const protocol::ProtocolError&) {
                continue;
            }
        }
        if (fd_ < 0) return std::nullopt;
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        pollfd pfd{fd_, POLLIN, 0};
        if (::poll(&pfd, 1, static_cast<int>(left.count())) <= 0) return std::nullopt;
        const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
        if (n <= 0) {
            close();
            return std::nullopt;
        }
        buffer_.append(buf, static_cast<std::size_t>(n));
    }
}

std::optional<Message> LineClient::await_reply(std::int64_t id, std::chrono::milliseconds timeout) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return std::nullopt;
        auto m = receive(left);
        if (!m) return std::nullopt;
        if ((m->kind == "ack" || m->kind == "error") && m->id == id) return m;
    }
}

}  // namespace lantern::service
