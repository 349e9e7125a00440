#include "nlip/screening.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlip/coulomb.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"
#include "nlip/quadrature.hpp"
#include "nlip/rng.hpp"

namespace nlip::screening {

namespace {

constexpr double kSlack = 1e-12;

bool shells_disjoint(Shell const& a, Shell const& b) {
    return a.outer <= b.inner + kSlack || b.outer <= a.inner + kSlack;
}

bool ball_shell_disjoint(Ball const& b, Shell const& s) {
    double const d = norm(b.center);
    return d - b.radius >= s.outer - kSlack || d + b.radius <= s.inner + kSlack;
}

/// Portion of the ray y + t w (0 <= t <= t_max) inside the sphere |z - c| < r,
/// integrated against t dt.
double ray_segment(Vec3 const& y, Vec3 const& w, double t_max, Vec3 const& c, double r) {
    Vec3 const d = y - c;
    double const b = dot(w, d);
    double const disc = b * b - (dot(d, d) - r * r);
    if (disc <= 0.0) return 0.0;
    double const s = std::sqrt(disc);
    double const lo = std::max(0.0, -b - s);
    double const hi = std::min(t_max, -b + s);
    return hi > lo ? 0.5 * (hi * hi - lo * lo) : 0.0;
}

double lens_volume(double R, double r, double d) {
    if (R <= 0.0 || r <= 0.0) return 0.0;
    if (d >= R + r) return 0.0;
    if (d + r <= R) return ball_volume(r);
    if (d + R <= r) return ball_volume(R);
    double const t = R + r - d;
    return pi * t * t * (d * d + 2 * d * r - 3 * r * r + 2 * d * R + 6 * r * R - 3 * R * R) / (12.0 * d);
}

SphereRule const& ray_rule() {
    static SphereRule const rule = sphere_rule<32>(64);
    return rule;
}

/// Rotation by a unit quaternion drawn from the seed.
struct Rotation {
    double w, x, y, z;
    Vec3 apply(Vec3 const& v) const {
        Vec3 const q{x, y, z};
        Vec3 const t = cross(q, v) * 2.0;
        return v + t * w + cross(q, t);
    }
};

Rotation seeded_rotation(std::uint64_t seed) {
    CounterRng rng(seed, 0x5c2ee11ULL);
    double q[4];
    double n = 0.0;
    for (double& c : q) {
        c = rng.normal();
        n += c * c;
    }
    n = std::sqrt(n);
    return {q[0] / n, q[1] / n, q[2] / n, q[3] / n};
}

template <class PhiAtRadius>
ScreeningScan scan_radii(PhiAtRadius&& min_at, ModelParams const& params, std::vector<double> const& r_grid,
                         double surplus) {
    if (r_grid.empty()) throw Error(ErrorKind::InvalidParams, "radius grid is empty");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (!(r_grid[i] > 1.0)) throw Error(ErrorKind::InvalidParams, "scan radii must exceed 1");
        if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw Error(ErrorKind::InvalidParams, "scan radii must increase");
    }
    ScreeningScan scan;
    for (double r : r_grid) scan.per_radius.emplace_back(r, min_at(r));

    double const tol_abs = 1e-9 * std::max(1.0, params.Z);
    std::size_t first = r_grid.size();
    for (std::size_t i = r_grid.size(); i-- > 0;) {
        if (!(scan.per_radius[i].second > tol_abs)) break;
        first = i;
    }
    auto& rep = scan.report;
    rep.z_eff = derive_constants(params).z_eff;
    rep.surplus_charge = surplus;
    rep.screened = first < r_grid.size();
    std::size_t const at = rep.screened ? first : r_grid.size() - 1;
    rep.probe_radius = scan.per_radius[at].first;
    rep.min_phi = scan.per_radius[at].second;
    return scan;
}

} // namespace

double shell_potential(double s, double a, double b) {
    if (s <= a) return 2.0 * pi * (b * b - a * a);
    if (s < b) return (4.0 * pi / 3.0) * (s * s * s - a * a * a) / s + 2.0 * pi * (b * b - s * s);
    return (4.0 * pi / 3.0) * (b * b * b - a * a * a) / s;
}

double sphere_cap_area(double s, double d, double r) {
    if (s <= d - r || s >= d + r) return 0.0;
    return pi * s * (r * r - (s - d) * (s - d)) / d;
}

Body Body::from(BallConfig const& config, std::vector<Shell> const& shells) {
    validate_ball_config(config);
    Body body;
    for (auto const& s : shells) {
        if (!(s.inner >= 0.0) || !(s.outer > s.inner) || !std::isfinite(s.outer))
            throw Error(ErrorKind::NonPositiveRadius, "shell needs 0 <= inner < outer");
        body.shells.push_back(s);
    }
    for (auto const& b : config.balls) {
        if (b.origin_centered())
            body.shells.push_back({0.0, b.radius});
        else
            body.balls.push_back(b);
    }
    for (std::size_t i = 0; i < body.shells.size(); ++i)
        for (std::size_t j = i + 1; j < body.shells.size(); ++j)
            if (!shells_disjoint(body.shells[i], body.shells[j])) {
                std::ostringstream os;
                os << "shells [" << body.shells[i].inner << ", " << body.shells[i].outer << "] and ["
                   << body.shells[j].inner << ", " << body.shells[j].outer << "] overlap";
                throw Error(ErrorKind::OverlappingBalls, os.str());
            }
    for (std::size_t i = 0; i < body.balls.size(); ++i)
        for (auto const& s : body.shells)
            if (!ball_shell_disjoint(body.balls[i], s)) {
                std::ostringstream os;
                os << "ball " << i << " overlaps the shell [" << s.inner << ", " << s.outer << "]";
                throw Error(ErrorKind::OverlappingBalls, os.str());
            }
    return body;
}

double Body::volume() const {
    double v = 0.0;
    for (auto const& s : shells) v += s.volume();
    for (auto const& b : balls) v += b.volume();
    return v;
}

double Body::potential(Vec3 const& y) const {
    double const s = norm(y);
    double u = 0.0;
    for (auto const& sh : shells) u += shell_potential(s, sh.inner, sh.outer);
    for (auto const& b : balls) {
        double const d = norm(y - b.center);
        u += d >= b.radius ? b.volume() / d : 2.0 * pi * b.radius * b.radius - (2.0 * pi / 3.0) * d * d;
    }
    return u;
}

double Body::excised_potential(Vec3 const& y, Vec3 const& x) const {
    double const ry = norm(y - x);
    // Parts that miss B_1(x) contribute nothing.
    std::vector<Shell const*> hit_shells;
    std::vector<Ball const*> hit_balls;
    double const rx = norm(x);
    for (auto const& s : shells)
        if (rx + 1.0 > s.inner && rx - 1.0 < s.outer) hit_shells.push_back(&s);
    for (auto const& b : balls)
        if (norm(b.center - x) < b.radius + 1.0) hit_balls.push_back(&b);
    if (hit_shells.empty() && hit_balls.empty()) return 0.0;

    auto const& rule = ray_rule();
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.directions.size(); ++q) {
        Vec3 const& w = rule.directions[q];
        // Exit distance from B_1(x) along w.
        Vec3 const d = y - x;
        double const b = dot(w, d);
        double const t_max = -b + std::sqrt(std::max(0.0, b * b - (ry * ry - 1.0)));
        double seg = 0.0;
        for (auto const* s : hit_shells) {
            seg += ray_segment(y, w, t_max, {}, s->outer);
            if (s->inner > 0.0) seg -= ray_segment(y, w, t_max, {}, s->inner);
        }
        for (auto const* bl : hit_balls) seg += ray_segment(y, w, t_max, bl->center, bl->radius);
        acc += rule.weights[q] * seg;
    }
    return acc;
}

double Body::volume_in_ball(double R) const {
    double v = 0.0;
    for (auto const& s : shells) v += ball_volume(std::min(s.outer, std::max(R, 0.0))) - ball_volume(std::min(s.inner, std::max(R, 0.0)));
    for (auto const& b : balls) v += lens_volume(R, b.radius, norm(b.center));
    return v;
}

double Body::radial_integral(std::function<double(double)> const& U, std::vector<double> const& breaks) const {
    static auto const gl = gauss_legendre<16>(0.0, 1.0);
    auto piecewise = [&](double lo, double hi, auto const& weight) {
        std::vector<double> pts{lo, hi};
        for (double b : breaks)
            if (b > lo && b < hi) pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double const a = pts[i], len = pts[i + 1] - pts[i];
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                double const s = a + len * gl.nodes[q];
                acc += len * gl.weights[q] * U(s) * weight(s);
            }
        }
        return acc;
    };
    double total = 0.0;
    for (auto const& s : shells) total += piecewise(s.inner, s.outer, [](double r) { return 4.0 * pi * r * r; });
    for (auto const& b : balls) {
        double const d = norm(b.center);
        total += piecewise(d - b.radius, d + b.radius, [&](double r) { return sphere_cap_area(r, d, b.radius); });
    }
    return total;
}

double Body::coulomb_square() const {
    double total = 0.0;
    std::vector<double> breaks;
    for (auto const& s : shells) {
        breaks = {s.inner, s.outer};
        total += radial_integral([&](double r) { return shell_potential(r, s.inner, s.outer); }, breaks);
    }
    for (std::size_t i = 0; i < balls.size(); ++i) {
        // Shell-ball cross terms were counted once above from the shell side.
        for (auto const& s : shells) {
            Body const one{{}, {balls[i]}};
            breaks = {s.inner, s.outer};
            total += one.radial_integral([&](double r) { return shell_potential(r, s.inner, s.outer); }, breaks);
        }
        for (std::size_t j = 0; j < balls.size(); ++j) {
            if (i == j)
                total += 2.0 * (16.0 * pi * pi / 15.0) * std::pow(balls[i].radius, 5);
            else
                total += balls[i].volume() * balls[j].volume() / norm(balls[i].center - balls[j].center);
        }
    }
    return total;
}

EnergyBreakdown body_energy(Body const& body, double Z) {
    double per = 0.0;
    for (auto const& s : body.shells) per += 4.0 * pi * (s.outer * s.outer + s.inner * s.inner);
    for (auto const& b : body.balls) per += 4.0 * pi * b.radius * b.radius;
    double attr = 0.0;
    for (auto const& s : body.shells) attr += 2.0 * pi * Z * (s.outer * s.outer - s.inner * s.inner);
    for (auto const& b : body.balls) attr += Z * b.volume() / norm(b.center);
    return EnergyBreakdown::make(per, 0.5 * body.coulomb_square(), attr);
}

void ProbeSpec::validate() const {
    if (samples_per_ball < 32) throw Error(ErrorKind::InvalidParams, "samples_per_ball must be >= 32");
    if (shell_samples < 12) throw Error(ErrorKind::InvalidParams, "shell_samples must be >= 12");
}

std::vector<Vec3> probe_points(ProbeSpec const& probe) {
    probe.validate();
    std::vector<Vec3> pts{probe.x};
    for (int a = 0; a < 3; ++a)
        for (double sgn : {-1.0, 1.0}) {
            Vec3 e;
            (a == 0 ? e.x : a == 1 ? e.y : e.z) = sgn;
            pts.push_back(probe.x + e);
        }
    auto const rot = seeded_rotation(probe.seed);
    for (int i = 1; i <= probe.samples_per_ball; ++i) {
        double const r = std::cbrt(radical_inverse(i, 2));
        double const z = 2.0 * radical_inverse(i, 3) - 1.0;
        double const phi = 2.0 * pi * radical_inverse(i, 5);
        double const s = std::sqrt(std::max(0.0, 1.0 - z * z));
        pts.push_back(probe.x + rot.apply(Vec3{s * std::cos(phi), s * std::sin(phi), z} * r));
    }
    return pts;
}

double phi_x_at(Body const& body, double Z, Vec3 const& x, Vec3 const& y) {
    double const ny = norm(y);
    double const nucleus = Z > 0.0 ? Z / ny : 0.0;
    return body.potential(y) - body.excised_potential(y, x) - nucleus;
}

double phi_x(ProbeSpec const& probe, Body const& body, double Z) {
    if (norm(probe.x) == 0.0) throw Error(ErrorKind::DegenerateProbe, "probe center is the origin");
    double m = std::numeric_limits<double>::infinity();
    for (auto const& y : probe_points(probe)) {
        if (norm(y) < 1e-12) continue;
        m = std::min(m, phi_x_at(body, Z, probe.x, y));
    }
    return m;
}

GridPhi::GridPhi(grid::GridField field, double Z) : field_(std::move(field)), Z_(Z) {
    potential_ = grid::coulomb_potential(field_).values;
    nucleus_ = grid::inverse_distance_kernel(field_.geometry());
    for (double& k : nucleus_) k *= Z_;
}

std::size_t GridPhi::nearest(Vec3 const& y) const {
    auto const& g = field_.geometry();
    int const i = int(std::lround((y.x - g.origin_offset.x) / g.h));
    int const j = int(std::lround((y.y - g.origin_offset.y) / g.h));
    int const k = int(std::lround((y.z - g.origin_offset.z) / g.h));
    if (i < 0 || j < 0 || k < 0 || i >= g.dims[0] || j >= g.dims[1] || k >= g.dims[2])
        throw Error(ErrorKind::BallOutOfBox, "probe point lies outside the grid");
    return g.index(i, j, k);
}

double GridPhi::potential_at(Vec3 const& y) const { return potential_[nearest(y)]; }

double GridPhi::operator()(ProbeSpec const& probe) const {
    if (norm(probe.x) == 0.0) throw Error(ErrorKind::DegenerateProbe, "probe center is the origin");
    auto const& g = field_.geometry();
    auto const& solver = grid::solver_for(g);
    struct Cell {
        int i, j, k;
        double rho;
    };
    std::vector<Cell> excised;
    int lo[3], hi[3];
    double const xs[3] = {probe.x.x, probe.x.y, probe.x.z};
    double const off[3] = {g.origin_offset.x, g.origin_offset.y, g.origin_offset.z};
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, int(std::floor((xs[a] - 1.0 - off[a]) / g.h)));
        hi[a] = std::min(g.dims[a] - 1, int(std::ceil((xs[a] + 1.0 - off[a]) / g.h)));
    }
    for (int k = lo[2]; k <= hi[2]; ++k)
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) {
                double const rho = field_[g.index(i, j, k)];
                if (rho != 0.0 && norm(g.center(i, j, k) - probe.x) < 1.0) excised.push_back({i, j, k, rho});
            }
    double const h3 = g.cell_volume();
    double m = std::numeric_limits<double>::infinity();
    for (auto const& y : probe_points(probe)) {
        std::size_t const idx = nearest(y);
        int const k = int(idx / (std::size_t(g.dims[0]) * g.dims[1]));
        int const j = int((idx / g.dims[0]) % g.dims[1]);
        int const i = int(idx % g.dims[0]);
        double cut = 0.0;
        for (auto const& c : excised) cut += c.rho * solver.kernel(i - c.i, j - c.j, k - c.k);
        m = std::min(m, potential_[idx] - h3 * cut - nucleus_[idx]);
    }
    return m;
}

double phi_x(ProbeSpec const& probe, grid::GridField const& field, double Z) {
    return GridPhi(field, Z)(probe);
}

double surplus_charge(Body const& body, ModelParams const& params) {
    return params.Z - body.volume_in_ball(derive_constants(params).R_Z);
}

double surplus_charge(grid::GridField const& field, ModelParams const& params) {
    return params.Z - grid::mass_in_ball(field, derive_constants(params).R_Z);
}

ScreeningScan find_screening_radius(Body const& body, ModelParams const& params, std::vector<double> const& r_grid,
                                    ProbeSpec const& probe_spec) {
    probe_spec.validate();
    auto const dirs = fibonacci_sphere(probe_spec.shell_samples);
    auto min_at = [&](double r) {
        double m = std::numeric_limits<double>::infinity();
        for (auto const& d : dirs) {
            ProbeSpec p = probe_spec;
            p.x = d * r;
            m = std::min(m, phi_x(p, body, params.Z));
        }
        return m;
    };
    return scan_radii(min_at, params, r_grid, surplus_charge(body, params));
}

ScreeningScan find_screening_radius(grid::GridField const& field, ModelParams const& params,
                                    std::vector<double> const& r_grid, ProbeSpec const& probe_spec) {
    probe_spec.validate();
    GridPhi const phi(field, params.Z);
    auto const dirs = fibonacci_sphere(probe_spec.shell_samples);
    auto min_at = [&](double r) {
        double m = std::numeric_limits<double>::infinity();
        for (auto const& d : dirs) {
            ProbeSpec p = probe_spec;
            p.x = d * r;
            m = std::min(m, phi(p));
        }
        return m;
    };
    return scan_radii(min_at, params, r_grid, surplus_charge(field, params));
}

CloseballDiagnostics closeball_diagnostics(Body const& body, ModelParams const& params) {
    auto const dc = derive_constants(params);
    double const R = dc.R_Z;
    CloseballDiagnostics out;
    out.bound = dc.z_eff;
    out.missing_inside = params.Z - body.volume_in_ball(R);
    out.excess_in_2RZ = body.volume_in_ball(2.0 * R) - params.Z;
    double cross = 0.0;
    if (R > 0.0) cross = body.radial_integral([&](double s) { return shell_potential(s, 0.0, R); }, {R});
    double const sq = body.coulomb_square() + 2.0 * (16.0 * pi * pi / 15.0) * std::pow(R, 5) - 2.0 * cross;
    double const scale = body.coulomb_square() + 2.0 * (16.0 * pi * pi / 15.0) * std::pow(R, 5);
    if (sq < -1e-10 * std::max(1.0, scale)) throw Error(ErrorKind::NegativeNormSquared, "Coulomb distance squared is negative");
    out.coulomb_dist = std::sqrt(std::max(0.0, sq));
    return out;
}

CloseballDiagnostics closeball_diagnostics(grid::GridField const& field, ModelParams const& params) {
    auto const dc = derive_constants(params);
    CloseballDiagnostics out;
    out.bound = dc.z_eff;
    out.missing_inside = surplus_charge(field, params);
    out.excess_in_2RZ = grid::mass_in_ball(field, 2.0 * dc.R_Z) - params.Z;
    auto const ref = dc.R_Z > 0.0 ? grid::rasterize_shells({{0.0, dc.R_Z}}, field.geometry())
                                  : grid::GridField(field.geometry());
    out.coulomb_dist = grid::coulomb_norm(field, ref);
    return out;
}

} // namespace nlip::screening
