#pragma once
// Problem constants, ball configurations and the energy/screening record types
// shared by every module.

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "nlip/vec3.hpp"

namespace nlip {

inline constexpr double pi = std::numbers::pi;
/// Volume of the unit ball.
inline constexpr double unit_ball_volume = 4.0 * pi / 3.0;

inline double ball_volume(double r) { return unit_ball_volume * r * r * r; }
inline double radius_for_volume(double v) { return std::cbrt(v / unit_ball_volume); }

struct ModelParams {
    double Z = 0.0;          // nucleus charge
    double V = 0.0;          // prescribed volume
    double tol_rel = 1e-9;
    std::uint64_t seed = 0;

    /// Throws Error{InvalidParams} unless Z >= 0, V >= 0, tol_rel > 0 (all finite).
    void validate() const;
};

struct DerivedConstants {
    double R_Z = 0.0;    // radius of the ball of volume Z
    double z_eff = 0.0;  // (V-Z)^{1/2} Z^{1/3} for V >= Z, else 0
};

DerivedConstants derive_constants(ModelParams const& params);

struct Ball {
    Vec3 center;
    double radius = 0.0;

    double volume() const { return ball_volume(radius); }
    bool origin_centered() const { return center == Vec3{}; }
};

/// Union of disjoint unit-density balls plus the nucleus charge they feel.
struct BallConfig {
    std::vector<Ball> balls;
    double nucleus_charge = 0.0;

    double volume() const;
};

/// Returns `config` unchanged when radii are positive, balls are pairwise
/// disjoint (touching allowed) and no ball contains the origin off-center.
/// Throws NonPositiveRadius, OverlappingBalls or OffCenterOriginBall.
BallConfig const& validate_ball_config(BallConfig const& config);

/// Origin-centered shell {inner <= |x| <= outer}; inner = 0 is a centered ball.
struct Shell {
    double inner = 0.0;
    double outer = 0.0;

    double volume() const { return ball_volume(outer) - ball_volume(inner); }
};

struct EnergyBreakdown {
    double perimeter = 0.0;
    double coulomb_self = 0.0;
    double attraction = 0.0;
    double total = 0.0;

    /// Builds a breakdown with total = perimeter + coulomb_self - attraction.
    static EnergyBreakdown make(double perimeter, double coulomb_self, double attraction) {
        return {perimeter, coulomb_self, attraction, perimeter + coulomb_self - attraction};
    }
    double electrostatic() const { return coulomb_self - attraction; }
};

struct ScreeningReport {
    double probe_radius = 0.0;
    double min_phi = 0.0;
    double z_eff = 0.0;
    double surplus_charge = 0.0;
    bool screened = false;
};

/// Everything a config file can carry.
struct RunConfig {
    ModelParams params;
    BallConfig balls;           // nucleus_charge mirrors params.Z
    std::vector<Shell> shells;  // optional origin-centered shells
    bool has_balls = false;
};

/// Parses the JSON config document. Unknown keys are rejected.
/// Throws Error{InvalidConfig} on any schema violation.
RunConfig parse_config(std::string const& json_text);
RunConfig load_config(std::filesystem::path const& path);

/// Canonical JSON (sorted keys, round-trip doubles); identical configs give
/// identical text.
std::string to_canonical_json(RunConfig const& config);

std::uint64_t fnv1a64(std::string_view text);

/// 64-bit FNV-1a of the canonical JSON.
std::uint64_t params_hash(RunConfig const& config);

} // namespace nlip
