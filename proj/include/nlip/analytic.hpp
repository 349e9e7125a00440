#pragma once
// Closed-form energetics of balls and disjoint ball unions (Newton's theorem).

#include <vector>

#include "nlip/model.hpp"

namespace nlip::analytic {

/// 4 pi r^2. Throws NonPositiveRadius for r <= 0.
double ball_perimeter(double r);
/// Self-repulsion (1/2)∬ 1/|x-y| of a unit-density ball: (16 pi^2 / 15) r^5.
double ball_self_coulomb(double r);
/// Attraction ∫ Z/|x| over an origin-centered ball: 2 pi Z r^2.
double ball_attraction(double r, double Z);

/// Electrostatic energy of the ball B_{R_Z}, equal to -(8 pi^2 / 5) R_Z^5.
/// Throws NonPositiveCharge for Z <= 0.
double e_es_of_Z(double Z);

/// Potential of B_{R_Z} minus the nucleus potential Z/|x|:
///   2 pi R_Z^2 + (|B_1| - 2 pi)|x|^2 - Z/|x|   for |x| <= R_Z,  0 outside.
/// Throws OriginSingularity at |x| = 0.
double potential_u(double x_norm, double Z);

/// Energy of a validated disjoint ball union; origin-centered balls feel the
/// full interior attraction, all others are treated as point charges.
EnergyBreakdown union_energy(BallConfig const& config, ModelParams const& params);

/// Energy of `core` plus droplets of the given volumes, each infinitely far
/// from everything else (all cross interactions vanish).
EnergyBreakdown detached_energy(BallConfig const& core, std::vector<double> const& droplet_volumes,
                                ModelParams const& params);

/// Energy of a single origin-centered ball of volume V under nucleus charge Z.
EnergyBreakdown single_ball_energy(double V, double Z);

/// Single-ball upper bound on E_0(V): perimeter plus self-repulsion of one
/// ball of volume V. Zero for V = 0.
double e0_upper_bound(double V);

struct DropletBound {
    double energy = 0.0;
    long count = 0;  // number of equal droplets realizing the bound
};

/// Upper bound on E_0(V) from splitting V into n equal, mutually infinitely
/// separated balls, minimized over n >= 1.
DropletBound e0_droplet_bound(double V);

/// Optimal droplet volume for the per-volume cost of a detached ball,
/// argmin_w (4 pi r^2 + (16 pi^2/15) r^5)/w = 5/2.
inline constexpr double optimal_droplet_volume = 2.5;

/// E[single ball of volume V] - (E[ball of volume Z] + droplet bound on V - Z).
/// Positive means shedding the surplus to infinity lowers the energy.
double split_energy_gap(double V, double Z);

struct SplitScanRow {
    double Z = 0.0;
    double V_star = 0.0;
    double tau = 0.0;  // (V_star - Z) / Z^{2/3}
};

/// Smallest V > Z at which the detached-surplus competitor is at least as
/// good as the single centered ball, located to tol_rel * max(1, Z).
/// Throws NoThresholdFound if no crossing occurs below Z + 100 max(Z^{2/3}, 1).
SplitScanRow split_threshold(double Z, double tol_rel = 1e-9);

} // namespace nlip::analytic
