#pragma once

// Shell expansion kinematics.
//
// Each PET-G strip is modelled as a planar, inextensible circular arc of
// length L whose chord is the cap-to-base height h. Winding the belt on the
// servo pulley shortens h linearly; the strip bows outward and its sagitta
// adds to the attachment radius to give the shell's bulge radius.

namespace lantern::kinematics {

struct ShellConfig {
    double strip_length_mm = 150.0;
    int strip_count = 18;
    double attach_radius_mm = 40.0;
    double pulley_radius_mm = 8.0;
    double max_compression_mm = 0.35 * 150.0;

    /// Defaults with the mechanical stop at 35% of the given strip length.
    static ShellConfig for_length(double strip_length_mm);

    /// Throws ConfigError naming the first offending field.
    void validate() const;

    /// Pulley angle at the mechanical stop.
    double max_servo_angle_rad() const { return max_compression_mm / pulley_radius_mm; }
};

struct ShellGeometry {
    double height_mm = 0.0;
    double bulge_radius_mm = 0.0;
    double arc_half_angle_rad = 0.0;
    double compression = 0.0;
};

struct ArcSolution {
    double half_angle_rad = 0.0;
    double sagitta_ratio = 0.0;  ///< sagitta / strip length
};

/// Solves sin(θ)/θ = chord_ratio for θ in [0, π). Throws std::domain_error
/// unless 0 < chord_ratio <= 1.
ArcSolution solve_arc(double chord_ratio);

/// Linear belt take-up, clamped at the mechanical stop.
double servo_to_height(double servo_angle_rad, const ShellConfig& cfg);

/// Inverse of servo_to_height inside the unclamped region.
double height_to_servo(double height_mm, const ShellConfig& cfg);

double height_to_compression(double height_mm, const ShellConfig& cfg);
double compression_to_height(double compression, const ShellConfig& cfg);

ShellGeometry geometry_at(double compression, const ShellConfig& cfg);

/// Arc length 2Rθ rebuilt from chord and half angle (R = h / 2 sin θ).
double reconstructed_arc_length(const ShellGeometry& g);

}  // namespace lantern::kinematics
