#include "nlip/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlip/error.hpp"

namespace nlip::analytic {

namespace {

void require_positive_radius(double r) {
    if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveRadius, "radius must be > 0");
}

} // namespace

double ball_perimeter(double r) {
    require_positive_radius(r);
    return 4.0 * pi * r * r;
}

double ball_self_coulomb(double r) {
    require_positive_radius(r);
    return (16.0 * pi * pi / 15.0) * std::pow(r, 5);
}

double ball_attraction(double r, double Z) {
    require_positive_radius(r);
    return 2.0 * pi * Z * r * r;
}

double e_es_of_Z(double Z) {
    if (!(Z > 0.0)) throw Error(ErrorKind::NonPositiveCharge, "Z must be > 0");
    double const R = radius_for_volume(Z);
    return -(8.0 * pi * pi / 5.0) * std::pow(R, 5);
}

double potential_u(double x_norm, double Z) {
    if (!(x_norm > 0.0)) throw Error(ErrorKind::OriginSingularity, "u diverges at the origin");
    double const R = radius_for_volume(Z);
    if (x_norm >= R) return 0.0;
    return 2.0 * pi * R * R + (unit_ball_volume - 2.0 * pi) * x_norm * x_norm - Z / x_norm;
}

EnergyBreakdown union_energy(BallConfig const& config, ModelParams const& params) {
    validate_ball_config(config);
    double const Z = params.Z;
    auto const& balls = config.balls;
    double perimeter = 0.0, coulomb = 0.0, attraction = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        auto const& b = balls[i];
        perimeter += ball_perimeter(b.radius);
        coulomb += ball_self_coulomb(b.radius);
        if (b.origin_centered())
            attraction += ball_attraction(b.radius, Z);
        else
            attraction += Z * b.volume() / norm(b.center);
        for (std::size_t j = i + 1; j < balls.size(); ++j)
            coulomb += b.volume() * balls[j].volume() / norm(b.center - balls[j].center);
    }
    return EnergyBreakdown::make(perimeter, coulomb, attraction);
}

EnergyBreakdown detached_energy(BallConfig const& core, std::vector<double> const& droplet_volumes,
                                ModelParams const& params) {
    auto e = union_energy(core, params);
    for (double v : droplet_volumes) {
        if (v <= 0.0) continue;
        double const r = radius_for_volume(v);
        e.perimeter += ball_perimeter(r);
        e.coulomb_self += ball_self_coulomb(r);
    }
    return EnergyBreakdown::make(e.perimeter, e.coulomb_self, e.attraction);
}

EnergyBreakdown single_ball_energy(double V, double Z) {
    if (V <= 0.0) return {};
    double const r = radius_for_volume(V);
    return EnergyBreakdown::make(ball_perimeter(r), ball_self_coulomb(r), ball_attraction(r, Z));
}

double e0_upper_bound(double V) {
    if (V <= 0.0) return 0.0;
    double const r = radius_for_volume(V);
    return ball_perimeter(r) + ball_self_coulomb(r);
}

DropletBound e0_droplet_bound(double V) {
    if (V <= 0.0) return {0.0, 0};
    // The per-volume cost of one droplet is unimodal in its volume, so the best
    // integer count is a neighbour of V / optimal_droplet_volume.
    long const guess = std::max(1L, long(std::floor(V / optimal_droplet_volume)));
    DropletBound best{std::numeric_limits<double>::infinity(), 0};
    for (long n : {1L, guess, guess + 1}) {
        double const e = double(n) * e0_upper_bound(V / double(n));
        if (e < best.energy) best = {e, n};
    }
    return best;
}

double split_energy_gap(double V, double Z) {
    double const single = single_ball_energy(V, Z).total;
    double const core = single_ball_energy(std::min(V, Z), Z).total;
    return single - (core + e0_droplet_bound(V - std::min(V, Z)).energy);
}

SplitScanRow split_threshold(double Z, double tol_rel) {
    if (!(Z > 0.0)) throw Error(ErrorKind::NonPositiveCharge, "Z must be > 0");
    double const cap = 100.0 * std::max(std::pow(Z, 2.0 / 3.0), 1.0);
    double const tol_v = tol_rel * std::max(1.0, Z);

    // Geometric scan of the surplus W = V - Z for the first sign change of the
    // gap from negative to non-negative; W = 0 itself is the trivial tie.
    constexpr int n_scan = 2000;
    double const w_min = 1e-8 * std::max(1.0, cap);
    double const ratio = std::pow(cap / w_min, 1.0 / (n_scan - 1));
    double w_lo = 0.0;
    double w_hi = -1.0;
    double w = w_min;
    for (int k = 0; k < n_scan; ++k, w *= ratio) {
        double const w_eval = std::min(w, cap);
        if (split_energy_gap(Z + w_eval, Z) >= 0.0) {
            w_hi = w_eval;
            break;
        }
        w_lo = w_eval;
    }
    if (w_hi < 0.0)
        throw Error(ErrorKind::NoThresholdFound, "no splitting threshold below Z + " + std::to_string(cap));

    while (w_hi - w_lo > tol_v) {
        double const mid = 0.5 * (w_lo + w_hi);
        if (mid <= w_lo || mid >= w_hi) break;
        if (split_energy_gap(Z + mid, Z) >= 0.0)
            w_hi = mid;
        else
            w_lo = mid;
    }
    SplitScanRow row;
    row.Z = Z;
    row.V_star = Z + w_hi;
    row.tau = w_hi / std::pow(Z, 2.0 / 3.0);
    return row;
}

} // namespace nlip::analytic
