#pragma once
// Screened potential phi_x, surplus charge and the screening-radius scan.
//
// phi_x(y) = ∫_{Ω \ B_1(x)} 1/|y - z| dz - Z/|y|, evaluated on a body made of
// origin-centered shells and off-center balls (exact Newton potentials, the
// part inside B_1(x) removed by ray quadrature) or on a grid field.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "nlip/grid.hpp"
#include "nlip/model.hpp"

namespace nlip::screening {

/// Disjoint union of origin-centered shells and balls that exclude the origin.
/// An origin-centered ball is stored as a shell with inner radius 0.
struct Body {
    std::vector<Shell> shells;
    std::vector<Ball> balls;

    /// Validates the ball config, converts origin-centered balls to shells and
    /// checks that all parts are pairwise disjoint (touching allowed).
    /// Throws OverlappingBalls, OffCenterOriginBall or NonPositiveRadius.
    static Body from(BallConfig const& config, std::vector<Shell> const& shells = {});

    double volume() const;
    /// Newton potential ∫_Ω 1/|y - z| dz.
    double potential(Vec3 const& y) const;
    /// ∫_{Ω ∩ B_1(x)} 1/|y - z| dz for y in the closed ball B_1(x).
    double excised_potential(Vec3 const& y, Vec3 const& x) const;
    /// |Ω ∩ B_R(0)|, exact.
    double volume_in_ball(double R) const;
    /// ∬_{Ω×Ω} 1/|x - y|.
    double coulomb_square() const;
    /// ∫_Ω U(|x|) dx for a radial function with kinks only at `breaks`.
    double radial_integral(std::function<double(double)> const& U, std::vector<double> const& breaks) const;
};

/// Energy of the body with each part treated as its own set: perimeters add
/// part by part, so touching interfaces count twice.
EnergyBreakdown body_energy(Body const& body, double Z);

/// Potential of the shell {a <= |z| <= b} at distance s from the origin.
double shell_potential(double s, double a, double b);

/// Area of the sphere |z| = s inside the ball B_r(c), |c| = d >= r.
double sphere_cap_area(double s, double d, double r);

struct ProbeSpec {
    Vec3 x;
    int samples_per_ball = 64;  // low-discrepancy points in B_1(x)
    int shell_samples = 12;     // probe centers per radius in the scan
    std::uint64_t seed = 0;

    /// Throws InvalidParams when sample counts are below 32 / 12.
    void validate() const;
};

/// Sample points in B_1(x): the center, the six axis poles and
/// samples_per_ball Halton points under a seeded rotation.
std::vector<Vec3> probe_points(ProbeSpec const& probe);

/// min over the probe points of phi_x. Throws DegenerateProbe for x = 0.
double phi_x(ProbeSpec const& probe, Body const& body, double Z);
double phi_x_at(Body const& body, double Z, Vec3 const& x, Vec3 const& y);

/// phi_x on a grid: points snap to cell centers, cells with centers in
/// B_1(x) are removed from the Coulomb sum. Holds the full potential so
/// repeated probes only pay for the excised part.
class GridPhi {
public:
    GridPhi(grid::GridField field, double Z);
    double operator()(ProbeSpec const& probe) const;
    /// Potential of the field at the cell nearest to y.
    double potential_at(Vec3 const& y) const;
    grid::GridField const& field() const { return field_; }

private:
    grid::GridField field_;
    double Z_;
    std::vector<double> potential_;
    std::vector<double> nucleus_;
    std::size_t nearest(Vec3 const& y) const;
};

double phi_x(ProbeSpec const& probe, grid::GridField const& field, double Z);

/// |B_{R_Z} \ Ω| = Z - |Ω ∩ B_{R_Z}|.
double surplus_charge(Body const& body, ModelParams const& params);
double surplus_charge(grid::GridField const& field, ModelParams const& params);

struct ScreeningScan {
    ScreeningReport report;
    std::vector<std::pair<double, double>> per_radius;  // (r, min phi over the shell)
};

/// Smallest r in the increasing grid such that min phi_x > 1e-9 max(1, Z) for
/// every probe at every radius r' >= r. When none qualifies, screened is false
/// and the report carries the largest radius. Throws InvalidParams unless the
/// grid is increasing with every radius > 1.
ScreeningScan find_screening_radius(Body const& body, ModelParams const& params,
                                    std::vector<double> const& r_grid, ProbeSpec const& probe_spec = {});
ScreeningScan find_screening_radius(grid::GridField const& field, ModelParams const& params,
                                    std::vector<double> const& r_grid, ProbeSpec const& probe_spec = {});

struct CloseballDiagnostics {
    double missing_inside = 0.0;  // |B_{R_Z} \ Ω|
    double excess_in_2RZ = 0.0;   // |Ω ∩ B_{2 R_Z}| - Z
    double coulomb_dist = 0.0;    // ||χ_Ω - χ_{B_{R_Z}}||_C
    double bound = 0.0;           // (V - Z)^{1/2} Z^{1/3}
};

CloseballDiagnostics closeball_diagnostics(Body const& body, ModelParams const& params);
CloseballDiagnostics closeball_diagnostics(grid::GridField const& field, ModelParams const& params);

} // namespace nlip::screening
