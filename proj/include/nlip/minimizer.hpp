#pragma once
// Volume-constrained minimization of the relaxed energy
//   (1/c_W) ∫ (eps/2)|∇rho|^2 + W(rho)/eps  +  Coulomb  -  nucleus attraction
// over densities rho in [0, 1], and the analytic shed-a-droplet probe.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlip/grid.hpp"

namespace nlip::minimizer {

/// Double well W(rho) = rho^2 (1 - rho)^2 and its calibration ∫_0^1 sqrt(2W).
inline double double_well(double rho) { return rho * rho * (1.0 - rho) * (1.0 - rho); }
inline double double_well_prime(double rho) { return 2.0 * rho * (1.0 - rho) * (1.0 - 2.0 * rho); }
inline double const c_W = 0.23570226039551584;  // sqrt(2) / 6

enum class InitKind { centered_ball, random_blob, from_file };

InitKind parse_init(std::string const& name);
std::string to_string(InitKind kind);

struct MinimizerParams {
    int grid_n = 64;           // cells per side
    double box_side = 0.0;     // 0 picks max(3, 3 R_V)
    double epsilon = 0.0;      // interface width; 0 means 2h
    double step = 1.0;         // initial step of the preconditioned descent
    int max_iters = 2000;
    double stall_tol = 1e-5;   // relative best-energy decrease per 100 iterations
    InitKind init = InitKind::centered_ball;
    std::filesystem::path init_path;  // for from_file

    /// Grid used for a run with these params and volume V.
    grid::GridGeometry geometry(double V) const;
    double resolved_epsilon(double h) const { return epsilon > 0.0 ? epsilon : 2.0 * h; }
    /// Throws InvalidParams: eps >= 1.5h, step > 0, max_iters >= 1, grid_n >= 8.
    void validate(double h) const;
};

/// Modica-Mortola term, forward differences with rho = 0 beyond the box.
double modica_mortola(grid::ScalarField const& rho, double eps);

EnergyBreakdown relaxed_energy(grid::GridField const& field, ModelParams const& params, double eps);
EnergyBreakdown relaxed_energy(grid::GridField const& field, ModelParams const& params, MinimizerParams const& mp);

/// L2 gradient of relaxed_energy: dE/drho_i = h^3 * g_i. Values of rho are not
/// clamped, so the same routine serves finite-difference checks.
std::vector<double> relaxed_gradient(grid::ScalarField const& rho, ModelParams const& params, double eps);
double relaxed_energy_value(grid::ScalarField const& rho, ModelParams const& params, double eps);

/// rho <- clip(rho + mu, 0, 1) with mu chosen so that h^3 sum rho = V.
void project_mass(std::vector<double>& rho, double cell_volume, double V);

/// Tanh profile 1/2 (1 + tanh((R - |x|) / (sqrt(2) eps))) around the origin.
grid::GridField tanh_ball(grid::GridGeometry const& g, double R, double eps, Vec3 const& center = {});
/// Union of a few seeded random balls near the origin, smoothed to width eps
/// and projected to volume V.
grid::GridField random_blob(grid::GridGeometry const& g, double V, double eps, std::uint64_t seed);

struct MinimizeResult {
    grid::GridField field;
    EnergyBreakdown energy;
    int iterations = 0;
    bool converged = false;
    double epsilon = 0.0;
    std::vector<double> best_history;  // best energy after each iteration
};

/// Projected, preconditioned gradient descent with backtracking. The
/// Dirichlet part of the perimeter term and a stabilizing shift are treated
/// implicitly through a sine-transform solve. Returns the best field seen.
/// Throws BoxTooSmall when V exceeds half the box, Diverged when the energy
/// keeps rising at the smallest step.
MinimizeResult minimize(ModelParams const& params, MinimizerParams const& mp);

struct OptimalityProbe {
    double e_keep = 0.0;
    double e_shed = 0.0;
};

/// e_keep: energy of the config; e_shed: the outermost ball (largest
/// |c| + r) shrunk by volume delta about its own center plus a detached
/// droplet of volume delta (delta equal to the ball volume moves it whole).
/// Throws InvalidParams unless 0 <= delta <= volume of that ball.
OptimalityProbe local_optimality_probe(BallConfig const& config, ModelParams const& params, double delta);

} // namespace nlip::minimizer
