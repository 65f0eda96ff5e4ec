#pragma once

#include "lantern/devicesim.hpp"
#include "lantern/engine.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lantern::telemetry {

inline constexpr const char* kCsvHeader = "t_ms,compression,height_mm,bulge_mm,vib,led0_r,led0_g,led0_b,active";

struct Row {
    std::int64_t t_ms = 0;
    double compression = 0.0;
    double height_mm = 0.0;
    double bulge_mm = 0.0;
    double vib = 0.0;
    Rgb led0;
    std::string active;  ///< "none" when idle
};

Row make_row(const engine::ActuatorFrame& frame, const devicesim::DeviceState& device);

void write_header(std::ostream& out);
void write_row(std::ostream& out, const Row& row);

/// Reads a CSV written by write_header/write_row. Throws StreamError on a bad header or line.
std::vector<Row> read_csv(std::istream& in);

}  // namespace lantern::telemetry
