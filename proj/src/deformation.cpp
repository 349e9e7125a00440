#include "nlip/deformation.hpp"

#include <algorithm>
#include <cmath>

#include "nlip/coulomb.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"
#include "nlip/quadrature.hpp"
#include "nlip/rng.hpp"

namespace nlip::deform {

namespace {

void require_annulus(double r, StretchParams const& p) {
    double const slack = 1e-12 * p.R;
    if (!(r >= p.inner() - slack && r <= p.R + slack))
        throw Error(ErrorKind::OutOfAnnulus, "radius " + std::to_string(r) + " is outside [3R/4, R]");
}

EstimatePair upper(double lhs, double rhs, double hi) {
    EstimatePair e;
    e.lhs = lhs;
    e.rhs = rhs;
    e.band_hi = hi;
    e.within = lhs <= hi * rhs;
    return e;
}

} // namespace

void StretchParams::validate() const {
    if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorKind::InvalidParams, "R must be > 0");
    if (!(lambda >= 0.0 && lambda <= 0.2)) throw Error(ErrorKind::InvalidParams, "lambda must lie in [0, 0.2]");
}

double stretch_map(double r, StretchParams const& p) {
    p.validate();
    require_annulus(r, p);
    return r - p.lambda * (p.R - r);
}

double stretch_jacobian(double r, StretchParams const& p) {
    double const f = stretch_map(r, p);
    return (1.0 + p.lambda) * (f / r) * (f / r);
}

double stretch_inverse(double s, StretchParams const& p) { return (s + p.lambda * p.R) / (1.0 + p.lambda); }

grid::GridField apply_stretch(grid::GridField const& field, StretchParams const& p) {
    p.validate();
    auto const& g = field.geometry();
    double const tol = 0.5 * std::sqrt(3.0) * g.h;
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        if (field[idx] == 0.0) return;
        double const r = norm(g.center(i, j, k));
        if (r < p.inner() - tol || r > p.R + tol)
            throw Error(ErrorKind::SupportOutOfAnnulus,
                        "occupied cell at radius " + std::to_string(r) + " lies outside the annulus");
    });
    std::vector<double> out(g.size(), 0.0);
    double const s_min = stretch_map(p.inner(), p) - 2.0 * g.h;
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        Vec3 const x = g.center(i, j, k);
        double const s = norm(x);
        if (s < s_min) return;
        Vec3 const src = x * (stretch_inverse(s, p) / s);
        out[idx] = std::clamp(grid::interpolate(g, field.data(), src), 0.0, 1.0);
    });
    return grid::GridField(g, std::move(out));
}

double cap_area(grid::GridField const& field, double r, int directions) {
    int hits = 0;
    for (auto const& w : fibonacci_sphere(directions))
        if (grid::interpolate(field.geometry(), field.data(), w * r) >= 0.5) ++hits;
    return 4.0 * pi * r * r * double(hits) / double(directions);
}

DeformReport verify_deform_estimates(grid::GridField const& field, StretchParams const& p,
                                     std::optional<grid::ScalarField> const& phi, DeformBands const& bands) {
    p.validate();
    auto const& g = field.geometry();
    auto const moved = apply_stretch(field, p);
    double const lam = p.lambda;
    double const h3 = g.cell_volume();

    std::vector<double> phi_values(g.size());
    if (phi) {
        if (!(phi->geom == g)) throw Error(ErrorKind::GeometryMismatch, "phi lives on a different grid");
        double worst = 0.0;
        auto const& v = phi->values;
        grid::for_each_cell(g, [&](int i, int j, int k, std::size_t) {
            if (i == 0 || j == 0 || k == 0 || i + 1 >= g.dims[0] || j + 1 >= g.dims[1] || k + 1 >= g.dims[2]) return;
            if (norm(g.center(i, j, k)) > p.R) return;
            double const gx = v[g.index(i + 1, j, k)] - v[g.index(i - 1, j, k)];
            double const gy = v[g.index(i, j + 1, k)] - v[g.index(i, j - 1, k)];
            double const gz = v[g.index(i, j, k + 1)] - v[g.index(i, j, k - 1)];
            worst = std::max(worst, std::sqrt(gx * gx + gy * gy + gz * gz) / (2.0 * g.h));
        });
        if (worst > (1.0 + 1e-6) / p.R) throw Error(ErrorKind::InvalidParams, "phi gradient exceeds 1/R inside B_R");
        phi_values = v;
    } else {
        grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) { phi_values[idx] = norm(g.center(i, j, k)) / p.R; });
    }

    DeformReport rep;
    rep.params = p;

    double const vol = field.mass(), vol_moved = moved.mass();
    rep.volume.lhs = vol_moved - vol;
    rep.volume.rhs = lam * vol;
    rep.volume.band_lo = bands.volume_lo;
    rep.volume.band_hi = bands.volume_hi;
    rep.volume.within = rep.volume.lhs >= bands.volume_lo * rep.volume.rhs && rep.volume.lhs <= bands.volume_hi * rep.volume.rhs;

    double const per = grid::perimeter_estimate(field), per_moved = grid::perimeter_estimate(moved);
    rep.cap_area = cap_area(field, p.R - g.h);
    rep.perimeter = upper(per_moved - per, lam * (per - 2.0 * rep.cap_area + 4.0 * vol / p.R), bands.perimeter_hi);

    double pot = 0.0, pot_moved = 0.0, pot_rhs = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        pot += field[i] * phi_values[i];
        pot_moved += moved[i] * phi_values[i];
        pot_rhs += field[i] * (phi_values[i] + 1.0);
    }
    rep.potential = upper(h3 * (pot_moved - pot), lam * h3 * pot_rhs, bands.potential_hi);

    double const d = grid::coulomb_self_energy(field), d_moved = grid::coulomb_self_energy(moved);
    rep.coulomb = upper(d_moved - d, lam * d, bands.coulomb_hi);
    return rep;
}

grid::GridField random_shell_set(grid::GridGeometry const& g, double R, std::uint64_t seed, std::uint64_t index) {
    double const r_in = 0.75 * R;
    if (index == 0)
        return grid::rasterize_indicator(g, [&](Vec3 const& x) {
            double const r = norm(x);
            return r >= r_in && r <= R;
        });
    CounterRng rng(seed, index);
    int const n = 1 + int(rng.uniform() * 6.0);
    std::vector<Ball> blobs;
    for (int i = 0; i < n; ++i) {
        double const rc = rng.uniform(r_in, R);
        blobs.push_back({rng.unit_vector() * rc, rng.uniform(0.15, 0.5) * R});
    }
    return grid::rasterize_indicator(g, [&](Vec3 const& x) {
        double const r = norm(x);
        if (r < r_in || r > R) return false;
        for (auto const& b : blobs)
            if (norm(x - b.center) < b.radius) return true;
        return false;
    });
}

} // namespace nlip::deform
