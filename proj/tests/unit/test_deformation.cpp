#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "nlip/coulomb.hpp"
#include "nlip/deformation.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"
#include "nlip/rng.hpp"

using namespace nlip;
using namespace nlip::deform;

namespace {

grid::GridField annulus(int n, double side, double a, double b) {
    auto const g = grid::GridGeometry::centered_cube(n, side);
    return grid::rasterize_shells({{a, b}}, g);
}

} // namespace

TEST_CASE("stretch map") {
    StretchParams const p{1.0, 0.1};
    CHECK(stretch_map(1.0, p) == 1.0);
    CHECK(stretch_map(0.75, p) == doctest::Approx(0.725).epsilon(1e-15));
    CHECK(stretch_map(0.8, StretchParams{1.0, 0.0}) == 0.8);
    CHECK_THROWS_AS(stretch_map(0.7, p), Error);
    CHECK_THROWS_AS(stretch_map(1.01, p), Error);
    CHECK_THROWS_AS((StretchParams{1.0, 0.3}.validate()), Error);
    CHECK_THROWS_AS((StretchParams{1.0, -0.01}.validate()), Error);
    CHECK_THROWS_AS((StretchParams{0.0, 0.1}.validate()), Error);
    for (double r = 0.75; r <= 1.0; r += 0.01) CHECK(stretch_inverse(stretch_map(r, p), p) == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("stretch jacobian") {
    StretchParams const p{1.0, 0.1};
    CHECK(stretch_jacobian(1.0, p) == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(stretch_jacobian(0.9, StretchParams{1.0, 0.0}) == 1.0);
    CHECK(stretch_jacobian(0.75, p) == doctest::Approx(1.1 * std::pow(0.725 / 0.75, 2)).epsilon(1e-14));
    CHECK(stretch_jacobian(0.75, p) == doctest::Approx(1.02787).epsilon(1e-5));

    // Determinant of the finite-difference Jacobian of x -> f(|x|) x/|x|.
    StretchParams const q{2.0, 0.07};
    Vec3 const dir = Vec3{0.3, -0.5, 0.8} / norm(Vec3{0.3, -0.5, 0.8});
    auto F = [&](Vec3 x) { return x * (stretch_map(norm(x), q) / norm(x)); };
    for (int i = 0; i < 100; ++i) {
        double const r = q.inner() + 1e-4 + (q.R - q.inner() - 2e-4) * i / 99.0;
        Vec3 const x = dir * r;
        double const e = 1e-6;
        Vec3 c[3];
        Vec3 const unit[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        for (int a = 0; a < 3; ++a) c[a] = (F(x + unit[a] * e) - F(x - unit[a] * e)) / (2 * e);
        double const det = dot(c[0], cross(c[1], c[2]));
        CHECK(det == doctest::Approx(stretch_jacobian(r, q)).epsilon(1e-6));
    }
}

TEST_CASE("jacobian lower bound") {
    for (double lam : {0.01, 0.05, 0.1}) {
        StretchParams const p{1.5, lam};
        for (int i = 0; i < 100; ++i) {
            double const r = p.inner() + (p.R - p.inner()) * i / 99.0;
            CHECK(stretch_jacobian(r, p) - 1.0 >= lam / 4.0);
        }
    }
}

TEST_CASE("identity stretch") {
    auto const f = annulus(48, 2.5, 0.75, 1.0);
    auto const same = apply_stretch(f, {1.0, 0.0});
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i] - same[i]));
    CHECK(worst < 1e-12);
    auto const rep = verify_deform_estimates(f, {1.0, 0.0});
    CHECK(std::abs(rep.volume.lhs) < 1e-12);
    CHECK(std::abs(rep.perimeter.lhs) < 1e-10);
    CHECK(std::abs(rep.potential.lhs) < 1e-12);
    CHECK(std::abs(rep.coulomb.lhs) < 1e-10);
}

TEST_CASE("support must lie in the annulus") {
    auto const g = grid::GridGeometry::centered_cube(32, 2.5);
    auto const ball = grid::rasterize(BallConfig{{{{0, 0, 0}, 0.5}}, 0.0}, g);
    CHECK_THROWS_AS(apply_stretch(ball, {1.0, 0.1}), Error);
}

TEST_CASE("full annulus volume ratio") {
    auto const f = annulus(96, 2.5, 0.75, 1.0);
    auto const moved = apply_stretch(f, {1.0, 0.1});
    double const exact = (1.0 - std::pow(0.725, 3)) / (1.0 - std::pow(0.75, 3));
    CHECK(std::abs(moved.mass() / f.mass() / exact - 1.0) < 0.01);
}

TEST_CASE("volume change matches the Jacobian integral") {
    // Sets resolved by at least 10 cells: annulus thickness 0.25 and blob
    // radii >= 0.3 with h = 2.2 / 128.
    StretchParams const p{1.0, 0.08};
    auto const g = grid::GridGeometry::centered_cube(128, 2.2);
    for (std::uint64_t idx = 0; idx < 4; ++idx) {
        CounterRng rng(31, idx);
        std::vector<Ball> blobs;
        for (int b = 0; b < 3; ++b) blobs.push_back({rng.unit_vector() * rng.uniform(0.75, 1.0), rng.uniform(0.3, 0.5)});
        auto const e = grid::rasterize_indicator(g, [&](Vec3 const& x) {
            double const r = norm(x);
            if (r < 0.75 || r > 1.0) return false;
            for (auto const& b : blobs)
                if (norm(x - b.center) < b.radius) return true;
            return false;
        });
        auto const moved = apply_stretch(e, p);
        double jac = 0.0;
        grid::for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
            if (e[n] == 0.0) return;
            double const r = std::clamp(norm(g.center(i, j, k)), p.inner(), p.R);
            jac += e[n] * (stretch_jacobian(r, p) - 1.0);
        });
        jac *= g.cell_volume();
        INFO("idx " << idx << " mass " << e.mass());
        CHECK(std::abs((moved.mass() - e.mass()) / jac - 1.0) < 0.02);
    }
}

TEST_CASE("thin outer shell gains about lambda times its volume") {
    auto const f = annulus(128, 2.5, 0.9, 1.0);
    StretchParams const p{1.0, 0.02};
    double const gain = apply_stretch(f, p).mass() - f.mass();
    // Exact: |B_R| - |B_{f(0.9)}| against |B_R| - |B_0.9|.
    double const exact = (1.0 - std::pow(stretch_map(0.9, p), 3)) - (1.0 - std::pow(0.9, 3));
    CHECK(gain / (p.lambda * f.mass()) == doctest::Approx(exact / (p.lambda * (1.0 - std::pow(0.9, 3)))).epsilon(0.05));
    CHECK(gain / (p.lambda * f.mass()) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("estimates on the full annulus") {
    auto const f = annulus(64, 2.5, 0.75, 1.0);
    auto const rep = verify_deform_estimates(f, {1.0, 0.05});
    CHECK(rep.volume.within);
    CHECK(rep.volume.ratio() >= 0.3);
    CHECK(rep.volume.ratio() <= 3.0);
    CHECK(rep.coulomb.ratio() <= 5.0);
    CHECK(rep.coulomb.ratio() > 0.0);
    CHECK(rep.cap_area == doctest::Approx(4.0 * pi * std::pow(1.0 - f.geometry().h, 2)).epsilon(1e-12));
}

TEST_CASE("supplied phi") {
    auto const f = annulus(48, 2.5, 0.75, 1.0);
    auto const& g = f.geometry();
    auto phi = grid::ScalarField::zeros(g);
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t n) { phi.values[n] = 0.5 * g.center(i, j, k).x; });
    CHECK_NOTHROW(verify_deform_estimates(f, {1.0, 0.05}, phi));
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t n) { phi.values[n] = 2.0 * g.center(i, j, k).x; });
    CHECK_THROWS_AS(verify_deform_estimates(f, {1.0, 0.05}, phi), Error);
}

TEST_CASE("random shell sets stay in the annulus") {
    auto const g = grid::GridGeometry::centered_cube(48, 2.5);
    for (std::uint64_t idx = 0; idx < 5; ++idx) {
        auto const e = random_shell_set(g, 1.0, 2, idx);
        CHECK_NOTHROW(apply_stretch(e, {1.0, 0.05}));
        auto const again = random_shell_set(g, 1.0, 2, idx);
        CHECK(std::equal(e.data().begin(), e.data().end(), again.data().begin()));
    }
}
