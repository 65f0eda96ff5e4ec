#pragma once
// Minimal blocking WebSocket client for exercising the browser-framing port.

#include "lantern/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <optional>
#include <random>
#include <string>

namespace lantern::testing {

class WsClient {
public:
    explicit WsClient(int port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(static_cast<std::uint16_t>(port));
        ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw std::runtime_error("connect");
        const std::string key = "dGhlIHNhbXBsZSBub25jZQ==";
        const std::string req = "GET / HTTP/1.1\r\nHost: localhost\r\nUpgrade: websocket\r\nConnection: Upgrade\r\n"
                                "Sec-WebSocket-Key: " + key + "\r\nSec-WebSocket-Version: 13\r\n\r\n";
        ::send(fd_, req.data(), req.size(), MSG_NOSIGNAL);
        while (buf_.find("\r\n\r\n") == std::string::npos)
            if (!read_some(2000)) throw std::runtime_error("no handshake reply");
        const auto end = buf_.find("\r\n\r\n");
        response_ = buf_.substr(0, end);
        buf_.erase(0, end + 4);
    }
    ~WsClient() { ::close(fd_); }

    const std::string& handshake_response() const { return response_; }

    /// Client frames are masked, as browsers do.
    void send_text(const std::string& text, std::uint8_t opcode = 0x1) {
        std::string f;
        f.push_back(static_cast<char>(0x80 | opcode));
        const auto n = text.size();
        if (n < 126) {
            f.push_back(static_cast<char>(0x80 | n));
        } else {
            f.push_back(static_cast<char>(0x80 | 126));
            f.push_back(static_cast<char>(n >> 8));
            f.push_back(static_cast<char>(n & 0xFF));
        }
        const char mask[4] = {0x12, 0x34, 0x56, 0x78};
        f.append(mask, 4);
        for (std::size_t i = 0; i < n; ++i) f.push_back(static_cast<char>(text[i] ^ mask[i % 4]));
        ::send(fd_, f.data(), f.size(), MSG_NOSIGNAL);
    }

    /// Next frame as (opcode, payload).
    std::optional<std::pair<int, std::string>> receive(int timeout_ms = 2000) {
        for (;;) {
            if (buf_.size() >= 2) {
                const int opcode = static_cast<std::uint8_t>(buf_[0]) & 0x0F;
                std::size_t len = static_cast<std::uint8_t>(buf_[1]) & 0x7F;
                std::size_t header = 2;
                if (len == 126 && buf_.size() >= 4) {
                    len = (std::size_t(std::uint8_t(buf_[2])) << 8) | std::uint8_t(buf_[3]);
                    header = 4;
                } else if (len == 126) {
                    len = SIZE_MAX;
                }
                if (len != SIZE_MAX && buf_.size() >= header + len) {
                    std::pair<int, std::string> out{opcode, buf_.substr(header, len)};
                    buf_.erase(0, header + len);
                    return out;
                }
            }
            if (!read_some(timeout_ms)) return std::nullopt;
        }
    }

    /// Next text frame decoded as a protocol message, skipping telemetry/events unless wanted.
    std::optional<protocol::Message> await_reply(std::int64_t id, int timeout_ms = 3000) {
        for (;;) {
            auto f = receive(timeout_ms);
            if (!f) return std::nullopt;
            if (f->first != 0x1) continue;
            auto m = protocol::decode(f->second);
            if ((m.kind == "ack" || m.kind == "error") && m.id == id) return m;
        }
    }

private:
    bool read_some(int timeout_ms) {
        pollfd p{fd_, POLLIN, 0};
        if (::poll(&p, 1, timeout_ms) <= 0) return false;
        char tmp[4096];
        const auto n = ::recv(fd_, tmp, sizeof tmp, 0);
        if (n <= 0) return false;
        buf_.append(tmp, static_cast<std::size_t>(n));
        return true;
    }

    int fd_ = -1;
    std::string buf_;
    std::string response_;
};

}  // namespace lantern::testing
