#include "lantern/telemetry.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace lantern::telemetry {

Row make_row(const engine::ActuatorFrame& frame, const devicesim::DeviceState& device) {
    Row r;
    r.t_ms = frame.t_ms;
    r.compression = device.geometry.compression;
    r.height_mm = device.geometry.height_mm;
    r.bulge_mm = device.geometry.bulge_radius_mm;
    r.vib = device.vibration_amplitude;
    r.led0 = device.led.empty() ? Rgb{} : device.led.front();
    r.active = frame.active_behavior.value_or("none");
    return r;
}

void write_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_row(std::ostream& out, const Row& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.4f,%.4f,%.6f,%u,%u,%u,", static_cast<long long>(r.t_ms), r.compression,
                  r.height_mm, r.bulge_mm, r.vib, unsigned(r.led0.r), unsigned(r.led0.g), unsigned(r.led0.b));
    out << buf << r.active << '\n';
}

std::vector<Row> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw StreamError("telemetry CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw StreamError("unexpected telemetry CSV header: " + line);

    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        if (fields.size() != 9) throw StreamError("telemetry CSV line " + std::to_string(line_no) + ": expected 9 fields");
        try {
            Row r;
            r.t_ms = std::stoll(fields[0]);
            r.compression = std::stod(fields[1]);
            r.height_mm = std::stod(fields[2]);
            r.bulge_mm = std::stod(fields[3]);
            r.vib = std::stod(fields[4]);
            r.led0 = {static_cast<std::uint8_t>(std::stoi(fields[5])), static_cast<std::uint8_t>(std::stoi(fields[6])),
                      static_cast<std::uint8_t>(std::stoi(fields[7]))};
            r.active = fields[8];
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw StreamError("telemetry CSV line " + std::to_string(line_no) + ": bad number");
        }
    }
    return rows;
}

}  // namespace lantern::telemetry
