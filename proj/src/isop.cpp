#include "nlip/isop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlip/quadrature.hpp"
#include "nlip/rng.hpp"

namespace nlip::grid {

namespace {

std::complex<double> cdot(std::complex<double> const (&a)[3], Vec3 const& w) {
    return a[0] * w.x + a[1] * w.y + a[2] * w.z;
}

struct SurfaceMesh {
    std::vector<Vec3> points;
    std::vector<Vec3> area_vectors;  // outward normal times area weight
};

SurfaceMesh build_mesh(StarShape const& shape) {
    constexpr unsigned n_theta = 64;
    constexpr int n_phi = 128;
    static auto const mu = gauss_legendre<n_theta>(-1.0, 1.0);
    SurfaceMesh mesh;
    mesh.points.reserve(mu.nodes.size() * n_phi);
    mesh.area_vectors.reserve(mu.nodes.size() * n_phi);
    double const dphi = 2.0 * pi / n_phi;
    double const s = shape.scale;
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
        double const ct = mu.nodes[i];
        double const st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < n_phi; ++j) {
            double const phi = (j + 0.5) * dphi;
            double const cp = std::cos(phi), sp = std::sin(phi);
            Vec3 const w{st * cp, st * sp, ct};
            Vec3 const w_theta{ct * cp, ct * sp, -st};
            Vec3 const w_phi{-st * sp, st * cp, 0.0};
            double const R = shape.radial(w);
            Vec3 const grad = shape.radial_gradient(w);
            Vec3 const x_theta = (w * dot(grad, w_theta) + w_theta * R) * s;
            Vec3 const x_phi = (w * dot(grad, w_phi) + w_phi * R) * s;
            // d(theta) = d(mu) / sin(theta) turns the Gauss weight into a theta weight.
            mesh.points.push_back(shape.center + w * (s * R));
            mesh.area_vectors.push_back(cross(x_theta, x_phi) * (mu.weights[i] * dphi / st));
        }
    }
    return mesh;
}

double mesh_inverse_distance(SurfaceMesh const& mesh, Vec3 const& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < mesh.points.size(); ++i) {
        Vec3 const d = mesh.points[i] - z;
        acc += dot(d, mesh.area_vectors[i]) / norm(d);
    }
    return 0.5 * acc;
}

Vec3 mesh_inverse_distance_gradient(SurfaceMesh const& mesh, Vec3 const& z) {
    Vec3 acc;
    for (std::size_t i = 0; i < mesh.points.size(); ++i) acc += mesh.area_vectors[i] / norm(mesh.points[i] - z);
    return -acc;
}

} // namespace

double StarShape::radial(Vec3 const& w) const {
    double r = 1.0;
    for (auto const& m : modes) r += m.amplitude * std::pow(cdot(m.a, w), m.degree).real();
    return r;
}

Vec3 StarShape::radial_gradient(Vec3 const& w) const {
    Vec3 g;
    for (auto const& m : modes) {
        auto const c = double(m.degree) * std::pow(cdot(m.a, w), m.degree - 1);
        g += Vec3{(c * m.a[0]).real(), (c * m.a[1]).real(), (c * m.a[2]).real()} * m.amplitude;
    }
    return g;
}

bool StarShape::contains(Vec3 const& x) const {
    Vec3 const d = x - center;
    double const r = norm(d);
    if (r == 0.0) return true;
    return r < scale * radial(d / r);
}

SurfaceIntegrals surface_integrals(StarShape const& shape) {
    auto const mesh = build_mesh(shape);
    SurfaceIntegrals out;
    for (std::size_t i = 0; i < mesh.points.size(); ++i) {
        out.area += norm(mesh.area_vectors[i]);
        out.volume += dot(mesh.points[i] - shape.center, mesh.area_vectors[i]);
    }
    out.volume /= 3.0;
    return out;
}

double inverse_distance_integral(StarShape const& shape, Vec3 const& z) {
    return mesh_inverse_distance(build_mesh(shape), z);
}

Vec3 inverse_distance_gradient(StarShape const& shape, Vec3 const& z) {
    return mesh_inverse_distance_gradient(build_mesh(shape), z);
}

StarShape normalize_volume(StarShape shape) {
    double const v = surface_integrals(shape).volume;
    shape.scale *= std::cbrt(unit_ball_volume / v);
    return shape;
}

StarShape random_star_shape(std::uint64_t seed, std::uint64_t index, IsopOptions const& opts) {
    CounterRng rng(seed, index);
    StarShape shape;
    shape.center = rng.in_unit_ball() * opts.shift_max;
    double const A = rng.uniform(0.0, opts.amplitude_max);
    for (int l = 2; l <= opts.l_max; ++l) {
        for (int m = 0; m < opts.modes_per_degree; ++m) {
            Vec3 const u = rng.unit_vector();
            Vec3 v = cross(u, rng.unit_vector());
            v = v / norm(v);
            StarShape::Mode mode;
            mode.degree = l;
            mode.amplitude = A / double((l - 1) * (l - 1)) * rng.uniform(-1.0, 1.0);
            double const s = 1.0 / std::sqrt(2.0);
            mode.a[0] = {u.x * s, v.x * s};
            mode.a[1] = {u.y * s, v.y * s};
            mode.a[2] = {u.z * s, v.z * s};
            shape.modes.push_back(mode);
        }
    }
    // Keep the radial function well away from zero so the set stays star-shaped.
    double r_min = std::numeric_limits<double>::infinity();
    for (auto const& w : fibonacci_sphere(2000)) r_min = std::min(r_min, shape.radial(w));
    if (r_min < 0.4) {
        double const shrink = 0.6 / (1.0 - r_min);
        for (auto& m : shape.modes) m.amplitude *= shrink;
    }
    return normalize_volume(shape);
}

IsopSample evaluate_isop(StarShape const& shape) {
    auto const mesh = build_mesh(shape);
    IsopSample s;
    double area = 0.0;
    for (auto const& a : mesh.area_vectors) area += norm(a);
    s.perimeter_excess = area - 4.0 * pi;
    s.gamma = 2.0 * pi - mesh_inverse_distance(mesh, {});
    s.shift = shape.center;

    // The potential of Ω has Laplacian -4 pi inside, so a fixed-Hessian
    // ascent converges quickly for near-balls.
    Vec3 z = shape.center;
    for (int it = 0; it < 200; ++it) {
        Vec3 const step = mesh_inverse_distance_gradient(mesh, z) * (3.0 / (4.0 * pi));
        z += step;
        if (norm(step) < 1e-13) break;
    }
    s.gamma_centered = 2.0 * pi - mesh_inverse_distance(mesh, z);
    for (auto const& m : shape.modes) s.amplitude = std::max(s.amplitude, std::abs(m.amplitude));
    return s;
}

std::vector<IsopSample> isop_sample(int n, std::uint64_t seed, IsopOptions const& opts) {
    std::vector<IsopSample> out;
    out.reserve(std::max(n, 0));
    for (int i = 0; i < n; ++i) out.push_back(evaluate_isop(random_star_shape(seed, std::uint64_t(i), opts)));
    return out;
}

IsopSummary summarize_isop(std::vector<IsopSample> const& samples, double gamma_threshold) {
    IsopSummary s;
    s.c_isop = s.min_ratio_origin = s.min_excess = std::numeric_limits<double>::infinity();
    for (auto const& x : samples) {
        s.min_excess = std::min(s.min_excess, x.perimeter_excess);
        if (x.gamma_centered > gamma_threshold) {
            ++s.counted;
            s.c_isop = std::min(s.c_isop, x.perimeter_excess / x.gamma_centered);
        }
        if (x.gamma > gamma_threshold) {
            ++s.counted_origin;
            s.min_ratio_origin = std::min(s.min_ratio_origin, x.perimeter_excess / x.gamma);
        }
    }
    return s;
}

} // namespace nlip::grid
