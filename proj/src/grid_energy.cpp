#include "nlip/grid_energy.hpp"

#include <algorithm>
#include <cmath>

#include "nlip/coulomb.hpp"
#include "nlip/error.hpp"

namespace nlip::grid {

namespace {

/// ∫_0^b ∫_0^c dy dz / sqrt(a^2 + y^2 + z^2), a > 0.
double face_inverse_distance(double a, double b, double c) {
    if (b <= 0.0 || c <= 0.0) return 0.0;
    double const d = std::sqrt(a * a + b * b + c * c);
    return b * std::asinh(c / std::hypot(a, b)) + c * std::asinh(b / std::hypot(a, c)) -
           a * std::atan(b * c / (a * d));
}

} // namespace

double corner_box_inverse_distance(double a, double b, double c) {
    if (a <= 0.0 || b <= 0.0 || c <= 0.0) return 0.0;
    // Cone decomposition from the origin over the three far faces.
    return 0.5 * (a * face_inverse_distance(a, b, c) + b * face_inverse_distance(b, a, c) +
                  c * face_inverse_distance(c, a, b));
}

std::vector<double> inverse_distance_kernel(GridGeometry const& g) {
    std::vector<double> K(g.size());
    double const half = 0.5 * g.h;
    for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        Vec3 const c = g.center(i, j, k);
        bool const holds_origin = std::abs(c.x) <= half && std::abs(c.y) <= half && std::abs(c.z) <= half;
        if (!holds_origin) {
            K[idx] = 1.0 / norm(c);
            return;
        }
        double const lo[3] = {half - c.x, half - c.y, half - c.z};  // extents on the negative side
        double const hi[3] = {half + c.x, half + c.y, half + c.z};
        double sum = 0.0;
        for (double ex : {lo[0], hi[0]})
            for (double ey : {lo[1], hi[1]})
                for (double ez : {lo[2], hi[2]}) sum += corner_box_inverse_distance(ex, ey, ez);
        K[idx] = sum / g.cell_volume();
    });
    return K;
}

double perimeter_estimate(GridField const& field) {
    auto const& g = field.geometry();
    auto const& d = g.dims;
    std::vector<double> a(field.data().begin(), field.data().end()), b(a.size());
    // Separable [1,2,1]/4 smoothing, zero beyond the box.
    int const stride[3] = {1, d[0], d[0] * d[1]};
    for (int axis = 0; axis < 3; ++axis) {
        for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
            int const pos = axis == 0 ? i : axis == 1 ? j : k;
            double const left = pos > 0 ? a[idx - stride[axis]] : 0.0;
            double const right = pos + 1 < d[axis] ? a[idx + stride[axis]] : 0.0;
            b[idx] = 0.25 * left + 0.5 * a[idx] + 0.25 * right;
        });
        std::swap(a, b);
    }
    auto at = [&](int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i >= d[0] || j >= d[1] || k >= d[2]) return 0.0;
        return a[g.index(i, j, k)];
    };
    double tv = 0.0;
    for_each_cell(g, [&](int i, int j, int k, std::size_t) {
        double const gx = at(i + 1, j, k) - at(i - 1, j, k);
        double const gy = at(i, j + 1, k) - at(i, j - 1, k);
        double const gz = at(i, j, k + 1) - at(i, j, k - 1);
        tv += std::sqrt(gx * gx + gy * gy + gz * gz);
    });
    return tv * g.h * g.h / 2.0;
}

double nuclear_attraction(GridField const& field, double Z) {
    if (Z == 0.0) return 0.0;
    auto const K = inverse_distance_kernel(field.geometry());
    double s = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) s += field[i] * K[i];
    return Z * s * field.geometry().cell_volume();
}

EnergyBreakdown grid_energy(GridField const& field, ModelParams const& params) {
    return EnergyBreakdown::make(perimeter_estimate(field), coulomb_self_energy(field),
                                 nuclear_attraction(field, params.Z));
}

double gamma_deficit(GridField const& field) {
    double const m = field.mass();
    if (std::abs(m - unit_ball_volume) > 0.01 * unit_ball_volume)
        throw Error(ErrorKind::MassMismatch,
                    "gamma needs mass |B_1| within 1%, got " + std::to_string(m) + "; rescale first");
    return 2.0 * pi - nuclear_attraction(field, 1.0);
}

double mass_in_ball(GridField const& field, double R, Vec3 const& center) {
    if (R <= 0.0) return 0.0;
    auto const w = rasterize_sdf(field.geometry(), [&](Vec3 const& p) { return norm(p - center) - R; });
    double s = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) s += std::min(field[i], w[i]);
    return s * field.geometry().cell_volume();
}

GridField threshold(GridField const& field, double level) {
    std::vector<double> out(field.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = field[i] >= level ? 1.0 : 0.0;
    return GridField(field.geometry(), std::move(out));
}

Vec3 center_of_mass(GridField const& field) {
    auto const& g = field.geometry();
    Vec3 acc;
    double m = 0.0;
    for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        acc += g.center(i, j, k) * field[idx];
        m += field[idx];
    });
    return m > 0.0 ? acc / m : Vec3{};
}

} // namespace nlip::grid
