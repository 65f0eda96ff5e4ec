#include "lantern/kinematics.hpp"

#include "lantern/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lantern::kinematics {

namespace {

constexpr double kBracketEps = 1e-12;
constexpr double kAngleTol = 1e-10;

}  // namespace

ShellConfig ShellConfig::for_length(double strip_length_mm) {
    ShellConfig cfg;
    cfg.strip_length_mm = strip_length_mm;
    cfg.max_compression_mm = 0.35 * strip_length_mm;
    return cfg;
}

void ShellConfig::validate() const {
    if (!(strip_length_mm > 0.0))
        throw ConfigError("device.shell.strip_length_mm must be > 0 (got " + std::to_string(strip_length_mm) + ")");
    if (strip_count < 3)
        throw ConfigError("device.shell.strip_count must be >= 3 (got " + std::to_string(strip_count) + ")");
    if (!(attach_radius_mm > 0.0))
        throw ConfigError("device.shell.attach_radius_mm must be > 0");
    if (!(pulley_radius_mm > 0.0))
        throw ConfigError("device.shell.pulley_radius_mm must be > 0");
    if (!(max_compression_mm > 0.0) || !(max_compression_mm < strip_length_mm))
        throw ConfigError("device.shell.max_compression_mm must be in (0, strip_length_mm)");
}

ArcSolution solve_arc(double chord_ratio) {
    if (!(chord_ratio > 0.0) || chord_ratio > 1.0)
        throw std::domain_error("solve_arc: chord ratio must be in (0, 1], got " + std::to_string(chord_ratio));
    if (chord_ratio == 1.0) return {};

    // sin(θ)/θ falls monotonically from 1 to 0 on (0, π).
    double lo = kBracketEps;
    double hi = std::numbers::pi - kBracketEps;
    while (hi - lo > kAngleTol) {
        const double mid = 0.5 * (lo + hi);
        const double f = std::sin(mid) / mid - chord_ratio;
        if (f > 0.0)
            lo = mid;
        else if (f < 0.0)
            hi = mid;
        else
            lo = hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    return {theta, (1.0 - std::cos(theta)) / (2.0 * theta)};
}

double servo_to_height(double servo_angle_rad, const ShellConfig& cfg) {
    if (servo_angle_rad < 0.0 || std::isnan(servo_angle_rad))
        throw std::domain_error("servo_to_height: negative servo angle");
    const double take_up = std::min(cfg.pulley_radius_mm * servo_angle_rad, cfg.max_compression_mm);
    return cfg.strip_length_mm - take_up;
}

double height_to_servo(double height_mm, const ShellConfig& cfg) {
    const double h = std::clamp(height_mm, cfg.strip_length_mm - cfg.max_compression_mm, cfg.strip_length_mm);
    return (cfg.strip_length_mm - h) / cfg.pulley_radius_mm;
}

double height_to_compression(double height_mm, const ShellConfig& cfg) {
    return std::clamp((cfg.strip_length_mm - height_mm) / cfg.max_compression_mm, 0.0, 1.0);
}

double compression_to_height(double compression, const ShellConfig& cfg) {
    return cfg.strip_length_mm - compression * cfg.max_compression_mm;
}

ShellGeometry geometry_at(double compression, const ShellConfig& cfg) {
    if (!(compression >= 0.0 && compression <= 1.0))
        throw std::domain_error("geometry_at: compression must be in [0, 1], got " + std::to_string(compression));

    ShellGeometry g;
    g.compression = compression;
    g.height_mm = compression_to_height(compression, cfg);
    const auto arc = solve_arc(g.height_mm / cfg.strip_length_mm);
    g.arc_half_angle_rad = arc.half_angle_rad;
    g.bulge_radius_mm = cfg.attach_radius_mm + arc.sagitta_ratio * cfg.strip_length_mm;
    return g;
}

double reconstructed_arc_length(const ShellGeometry& g) {
    if (g.arc_half_angle_rad == 0.0) return g.height_mm;
    const double radius = g.height_mm / (2.0 * std::sin(g.arc_half_angle_rad));
    return 2.0 * radius * g.arc_half_angle_rad;
}

}  // namespace lantern::kinematics
