#pragma once

#include "lantern/devicesim.hpp"
#include "lantern/engine.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

// Newline-delimited JSON control protocol. PROTOCOL.md is the normative
// description of every message.

namespace lantern::protocol {

inline constexpr int kVersion = 1;

/// Wire envelope. `id` correlates a request with its ack/error; unsolicited
/// server messages (telemetry, event) carry id 0.
struct Message {
    int v = kVersion;
    std::int64_t id = 0;
    std::string kind;
    nlohmann::json payload = nlohmann::json::object();

    friend bool operator==(const Message&, const Message&) = default;
};

enum class ErrorCode { malformed, unsupported_version, unknown_kind, bad_id, bad_payload };

std::string to_string(ErrorCode code);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

bool is_known_kind(std::string_view kind);
/// Kinds a client sends and the server answers with ack or error.
bool is_request_kind(std::string_view kind);

/// Canonical form: fields in v, id, kind, payload order, payload keys sorted,
/// terminated by a single '\n'.
std::string encode(const Message& msg);

/// Accepts one line (a trailing "\n" or "\r\n" is ignored); field order is free.
Message decode(std::string_view line);

Message make_ack(std::int64_t id, nlohmann::json payload = nlohmann::json::object());
Message make_error(std::int64_t id, const std::string& code, const std::string& message);
Message make_telemetry(const engine::ActuatorFrame& frame, const devicesim::DeviceState& device);
Message make_event(const engine::Notice& notice);

}  // namespace lantern::protocol
