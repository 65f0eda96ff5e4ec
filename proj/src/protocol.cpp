#include "lantern/protocol.hpp"

#include <array>

namespace lantern::protocol {

namespace {

constexpr std::array<std::string_view, 10> kKinds = {"hello",     "list",      "start", "stop", "set_param",
                                                     "subscribe", "telemetry", "event", "ack",  "error"};

}  // namespace

std::string to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::malformed: return "malformed";
        case ErrorCode::unsupported_version: return "unsupported_version";
        case ErrorCode::unknown_kind: return "unknown_kind";
        case ErrorCode::bad_id: return "bad_id";
        case ErrorCode::bad_payload: return "bad_payload";
    }
    return "malformed";
}

bool is_known_kind(std::string_view kind) {
    for (auto k : kKinds)
        if (k == kind) return true;
    return false;
}

bool is_request_kind(std::string_view kind) {
    return kind == "hello" || kind == "list" || kind == "start" || kind == "stop" || kind == "set_param" ||
           kind == "subscribe";
}

std::string encode(const Message& msg) {
    std::string out = "{\"v\":";
    out += std::to_string(msg.v);
    out += ",\"id\":";
    out += std::to_string(msg.id);
    out += ",\"kind\":";
    out += nlohmann::json(msg.kind).dump();
    out += ",\"payload\":";
    out += msg.payload.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    out += "}\n";
    return out;
}

Message decode(std::string_view line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(ErrorCode::malformed, std::string("not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ProtocolError(ErrorCode::malformed, "message must be a JSON object");

    auto v = j.find("v");
    if (v == j.end() || !v->is_number_integer()) throw ProtocolError(ErrorCode::malformed, "missing integer field 'v'");
    if (v->get<std::int64_t>() != kVersion)
        throw ProtocolError(ErrorCode::unsupported_version, "unsupported protocol version " + v->dump());

    auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) throw ProtocolError(ErrorCode::malformed, "missing string field 'kind'");
    Message m;
    m.kind = kind->get<std::string>();
    if (!is_known_kind(m.kind)) throw ProtocolError(ErrorCode::unknown_kind, "unknown kind '" + m.kind + "'");

    auto id = j.find("id");
    if (id == j.end() || !id->is_number_integer()) throw ProtocolError(ErrorCode::bad_id, "missing integer field 'id'");
    m.id = id->get<std::int64_t>();
    if (m.id < 0) throw ProtocolError(ErrorCode::bad_id, "id must be non-negative");
    if (is_request_kind(m.kind) && m.id == 0) throw ProtocolError(ErrorCode::bad_id, "requests need a non-zero id");
    if (m.kind == "telemetry" && m.id != 0) throw ProtocolError(ErrorCode::bad_id, "telemetry is unsolicited (id 0)");

    auto payload = j.find("payload");
    if (payload != j.end()) {
        if (!payload->is_object()) throw ProtocolError(ErrorCode::bad_payload, "payload must be an object");
        m.payload = *payload;
    }
    return m;
}

Message make_ack(std::int64_t id, nlohmann::json payload) { return {kVersion, id, "ack", std::move(payload)}; }

Message make_error(std::int64_t id, const std::string& code, const std::string& message) {
    return {kVersion, id, "error", {{"code", code}, {"message", message}}};
}

Message make_telemetry(const engine::ActuatorFrame& frame, const devicesim::DeviceState& device) {
    const Rgb led0 = device.led.empty() ? Rgb{} : device.led.front();
    nlohmann::json p = {
        {"t_ms", frame.t_ms},
        {"command", frame.servo_compression},
        {"compression", device.geometry.compression},
        {"height_mm", device.geometry.height_mm},
        {"bulge_mm", device.geometry.bulge_radius_mm},
        {"vib", device.vibration_amplitude},
        {"led0", {led0.r, led0.g, led0.b}},
        {"active", frame.active_behavior ? nlohmann::json(*frame.active_behavior) : nlohmann::json(nullptr)},
        {"phase", frame.phase},
    };
    return {kVersion, 0, "telemetry", std::move(p)};
}

Message make_event(const engine::Notice& n) {
    nlohmann::json p = {{"type", engine::to_string(n.kind)}, {"t_ms", n.t_ms}, {"detail", n.detail}};
    p["behavior"] = n.behavior.empty() ? nlohmann::json(nullptr) : nlohmann::json(n.behavior);
    return {kVersion, 0, "event", std::move(p)};
}

}  // namespace lantern::protocol
