#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "../oracles.hpp"
#include "../samplers.hpp"
#include "nlip/analytic.hpp"
#include "nlip/coulomb.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"

using namespace nlip;
using namespace nlip::grid;

namespace {

GridField unit_ball(int n, double side, Vec3 c = {}, double r = 1.0) {
    auto const g = GridGeometry::centered_cube(n, side);
    if (norm(c) > r || c == Vec3{}) return rasterize(BallConfig{{{c, r}}, 0.0}, g);
    return rasterize_sdf(g, [&](Vec3 const& p) { return norm(p - c) - r; });
}

double nearest_value(GridGeometry const& g, std::vector<double> const& v, Vec3 const& p, Vec3* at = nullptr) {
    auto const q = (p - g.origin_offset) / g.h;
    int const i = int(std::lround(q.x)), j = int(std::lround(q.y)), k = int(std::lround(q.z));
    if (at) *at = g.center(i, j, k);
    return v[g.index(i, j, k)];
}

} // namespace

TEST_CASE("geometry keeps the origin off cell centers") {
    auto const g = GridGeometry::centered_cube(16, 2.0);
    CHECK_NOTHROW(g.validate());
    auto const c = g.center(8, 8, 8);
    CHECK(c.x == doctest::Approx(0.5 * g.h));
    GridGeometry bad{{4, 4, 4}, 1.0, {-2, -2, -2}};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("rasterize") {
    auto const g = GridGeometry::centered_cube(64, 4.0);
    auto const empty = rasterize(BallConfig{}, g);
    CHECK(empty.mass() == 0.0);

    auto const ball = rasterize(BallConfig{{{{0, 0, 0}, 1.0}}, 0.0}, g);
    CHECK(std::abs(ball.mass() / (4.0 * pi / 3.0) - 1.0) < 0.01);

    BallConfig two{{{{-1, 0.2, 0}, 0.6}, {{0.9, 0, -0.3}, 0.8}}, 0.0};
    CHECK(std::abs(rasterize(two, g).mass() / two.volume() - 1.0) < 0.01);

    BallConfig out{{{{1.8, 0, 0}, 0.5}}, 0.0};
    CHECK_THROWS_AS(rasterize(out, g), Error);

    for (double v : ball.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("field dump is bit exact") {
    auto const g = GridGeometry::centered({5, 3, 2}, 0.37);
    std::vector<double> data(g.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::fmod(0.1 * i * i + 1.0 / 3.0, 1.0);
    auto const path = std::filesystem::temp_directory_path() / "nlip_test_dump.fld";
    write_field(path, g, data);
    std::ifstream f(path, std::ios::binary);
    char magic[8];
    f.read(magic, 8);
    CHECK(std::memcmp(magic, "NLIPFLD1", 8) == 0);
    CHECK(std::filesystem::file_size(path) == 8 + 12 + 32 + 8 * data.size());
    auto const back = read_field(path);
    CHECK(back.geometry() == g);
    CHECK(std::memcmp(back.data().data(), data.data(), 8 * data.size()) == 0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_field(path), Error);
}

TEST_CASE("corner box integral against quadrature") {
    for (auto [a, b, c] : {std::array{1.0, 1.0, 1.0}, std::array{0.5, 2.0, 1.5}, std::array{3.0, 0.2, 0.7}}) {
        double const ref = oracle::integrate(
            [&](double x) {
                return oracle::integrate(
                    [&](double y) {
                        double const s = x * x + y * y;
                        return std::asinh(c / std::sqrt(s));
                    },
                    0.0, b);
            },
            0.0, a);
        CHECK(corner_box_inverse_distance(a, b, c) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("nucleus kernel averages 1/|x| over the origin cells") {
    auto const g = GridGeometry::centered_cube(8, 1.0);
    auto const K = inverse_distance_kernel(g);
    double const h = g.h;
    // The cell [0,h]^3 is an octant of [-h,h]^3, so its average is the cube
    // average; the cube corner integral gives it exactly.
    double const cell_avg = corner_box_inverse_distance(h, h, h) / (h * h * h);
    double const mc = [&] {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(0.0, h);
        double s = 0.0;
        long const n = 4'000'000;
        for (long i = 0; i < n; ++i) s += 1.0 / std::sqrt(std::pow(u(gen), 2) + std::pow(u(gen), 2) + std::pow(u(gen), 2));
        return s / n;
    }();
    CHECK(std::abs(mc / cell_avg - 1.0) < 2e-3);
    CHECK(K[g.index(4, 4, 4)] == doctest::Approx(cell_avg).epsilon(1e-12));
    auto const far = g.center(0, 1, 2);
    CHECK(K[g.index(0, 1, 2)] == doctest::Approx(1.0 / norm(far)).epsilon(1e-14));
}

TEST_CASE("point charge potential") {
    auto const g = GridGeometry::centered_cube(32, 32 * 0.05);
    std::vector<double> d(g.size(), 0.0);
    d[g.index(5, 16, 16)] = 1.0;
    auto const pot = coulomb_potential(ScalarField{g, d});
    double const h = g.h;
    CHECK(std::abs(pot.values[g.index(15, 16, 16)] - h * h / 10.0) < 1e-10);
}

TEST_CASE("fast convolution matches the direct sum on 16^3") {
    int const n = 16;
    auto const g = GridGeometry::centered_cube(n, 2.0);
    CounterRng rng(77);
    std::vector<double> f(g.size());
    for (auto& v : f) v = rng.uniform() < 0.4 ? rng.uniform(-1.0, 1.0) : 0.0;
    auto const fast = coulomb_potential(ScalarField{g, f});
    auto const ref = oracle::direct_potential(n, g.h, kSelfTermG0, f);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num = std::max(num, std::abs(fast.values[i] - ref[i]));
        den = std::max(den, std::abs(ref[i]));
    }
    CHECK(num / den < 1e-8);

    // Coulomb norm of a perturbed ball difference against the same oracle.
    auto const ballZ = rasterize(BallConfig{{{{0, 0, 0}, 0.6}}, 0.0}, g);
    Vec3 const c{0.1, -0.05, 0.0};
    auto const omega = rasterize_indicator(g, [&](Vec3 const& p) { return norm(p - c) <= 0.55; });
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ballZ[i] - omega[i];
    auto const dref = oracle::direct_potential(n, g.h, kSelfTermG0, diff);
    double q = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) q += diff[i] * dref[i];
    q *= g.cell_volume();
    CHECK(coulomb_norm(ballZ, omega) == doctest::Approx(std::sqrt(q)).epsilon(1e-8));
}

TEST_CASE("ball potential") {
    auto const ball = unit_ball(96, 6.0);
    auto const g = ball.geometry();
    auto const pot = coulomb_potential(ball);
    Vec3 at;
    double const outside = nearest_value(g, pot.values, {2, 0, 0}, &at);
    CHECK(std::abs(outside / (4.0 * pi / 3.0 / norm(at)) - 1.0) < 0.01);
    double const center = interpolate(g, pot.values, {0, 0, 0});
    double const r0 = oracle::integrate([](double s) { return 4.0 * pi * s; }, 0.0, 1.0);
    CHECK(std::abs(center / r0 - 1.0) < 0.01);
}

TEST_CASE("self energy") {
    auto const g = GridGeometry::centered_cube(64, 4.0);
    CHECK(coulomb_self_energy(GridField(g)) == 0.0);
    auto const ball = unit_ball(64, 4.0);
    double const exact = 16.0 * pi * pi / 15.0;
    CHECK(std::abs(coulomb_self_energy(ball) / exact - 1.0) < 0.02);

    auto const g2 = GridGeometry::centered_cube(64, 8.0);
    BallConfig two{{{{-2.5, 0, 0}, 1.0}, {{2.5, 0, 0}, 1.0}}, 0.0};
    double const q = 4.0 * pi / 3.0;
    double const expect = 2.0 * exact + q * q / 5.0;
    CHECK(std::abs(coulomb_self_energy(rasterize(two, g2)) / expect - 1.0) < 0.02);
}

TEST_CASE("Coulomb norm") {
    auto const ball = unit_ball(48, 3.0);
    CHECK(coulomb_norm(ball, ball) == 0.0);
    double const exact = std::sqrt(2.0 * 16.0 * pi * pi / 15.0);
    CHECK(std::abs(coulomb_norm(ball, GridField(ball.geometry())) / exact - 1.0) < 0.02);
    double const n2 = std::pow(coulomb_norm(ball, GridField(ball.geometry())), 2);
    CHECK(coulomb_self_energy(ball) == doctest::Approx(0.5 * n2).epsilon(1e-10));
}

TEST_CASE("Coulomb form is positive on random signed fields") {
    auto const g = GridGeometry::centered_cube(16, 2.0);
    for (std::uint64_t s = 0; s < 30; ++s) {
        CounterRng rng(s);
        ScalarField f = ScalarField::zeros(g);
        for (auto& v : f.values) v = rng.uniform(-1.0, 1.0);
        CHECK(coulomb_pairing(f, f) >= 0.0);
        CHECK_NOTHROW(coulomb_norm(f));
    }
}

TEST_CASE("duality") {
    auto const g = GridGeometry::centered_cube(24, 3.0);
    ScalarField f = ScalarField::zeros(g);
    CounterRng rng(9);
    for (auto& v : f.values) v = rng.uniform() < 0.3 ? rng.uniform(-1.0, 1.0) : 0.0;
    auto const zero = duality_check(f, ScalarField::zeros(g));
    CHECK(zero.lhs == 0.0);
    CHECK(zero.rhs == 0.0);
    CHECK(zero.holds(0.0));

    auto psi = coulomb_potential(f);
    for (auto& v : psi.values) v /= 4.0 * pi;
    auto const eq = duality_check(f, psi, DirichletMode::CoulombDual);
    CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-6));

    for (std::uint64_t s = 0; s < 50; ++s) {
        CounterRng r(s, 1);
        ScalarField p = ScalarField::zeros(g);
        for (auto& v : p.values) v = r.normal();
        for (auto mode : {DirichletMode::CentralDifference, DirichletMode::CoulombDual}) {
            auto const d = duality_check(f, p, mode);
            CHECK(d.holds(1e-9 * std::abs(d.rhs)));
        }
    }
}

TEST_CASE("grid energy") {
    auto const g = GridGeometry::centered_cube(64, 4.0);
    auto const z = grid_energy(GridField(g), {1.0, 0.0});
    CHECK(z.perimeter == 0.0);
    CHECK(z.coulomb_self == 0.0);
    CHECK(z.attraction == 0.0);
    CHECK(z.total == 0.0);

    double const Z = 4.0 * pi / 3.0;
    auto const ball = unit_ball(64, 4.0);
    auto const e = grid_energy(ball, {Z, Z});
    CHECK(std::abs(e.attraction / (8.0 * pi * pi / 3.0) - 1.0) < 0.02);
    auto const e0 = grid_energy(ball, {0.0, Z});
    CHECK(std::abs(e0.total / (4.0 * pi + 16.0 * pi * pi / 15.0) - 1.0) < 0.03);
    CHECK(e.total == e.perimeter + e.coulomb_self - e.attraction);
}

TEST_CASE("gamma deficit") {
    double const two_pi = 2.0 * pi;
    auto const centered = unit_ball(64, 4.0);
    CHECK(std::abs(gamma_deficit(centered)) < 0.02 * two_pi);
    auto const shifted2 = unit_ball(64, 8.0, {2, 0, 0});
    CHECK(std::abs(gamma_deficit(shifted2) / (4.0 * pi / 3.0) - 1.0) < 0.02);
    auto const shifted1 = unit_ball(96, 6.0, {1, 0, 0});
    CHECK(std::abs(gamma_deficit(shifted1) / (2.0 * pi / 3.0) - 1.0) < 0.03);
    auto const small = unit_ball(64, 4.0, {}, 0.8);
    CHECK_THROWS_AS(gamma_deficit(small), Error);
}

TEST_CASE("ball minimizes the electrostatic part") {
    double const Z = 4.0 * pi / 3.0;
    auto const g = GridGeometry::centered_cube(48, 6.0);
    double const floor = analytic::e_es_of_Z(Z) - 0.03 * std::abs(analytic::e_es_of_Z(Z));
    for (std::uint64_t i = 0; i < 12; ++i) {
        auto const f = sampler::ees_config(g, Z, 21, i);
        CHECK(f.mass() >= Z);
        auto const e = grid_energy(f, {Z, f.mass()});
        CHECK(e.electrostatic() >= floor);
    }
}

TEST_CASE("mean value inequality for the screened potential") {
    // u = potential of chi_{B_1} - chi_Omega is superharmonic in B_1.
    auto const g = GridGeometry::centered_cube(48, 6.0);
    auto const b1 = unit_ball(48, 6.0);
    for (std::uint64_t s = 0; s < 6; ++s) {
        CounterRng rng(s, 7);
        BallConfig omega;
        omega.balls.push_back({{}, rng.uniform(0.3, 0.9)});
        Vec3 const dir = rng.unit_vector();
        double const r = rng.uniform(0.4, 0.8);
        omega.balls.push_back({dir * (omega.balls[0].radius + r + rng.uniform(0.0, 0.8)), r});
        auto const om = rasterize(omega, g);
        ScalarField u = ScalarField::zeros(g);
        for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = b1[i] - om[i];
        auto const pot = coulomb_potential(u);
        double avg = 0.0;
        for (std::size_t i = 0; i < u.values.size(); ++i) avg += b1[i] * pot.values[i];
        avg *= g.cell_volume();
        double const u0 = interpolate(g, pot.values, {});
        CHECK(avg <= (4.0 * pi / 3.0) * u0 + 0.02 * (4.0 * pi / 3.0) * std::abs(u0));
    }
}

TEST_CASE("center of mass, threshold and mass in ball") {
    auto const f = unit_ball(48, 4.0, {0.5, -0.25, 0.0}, 0.8);
    auto const c = center_of_mass(f);
    CHECK(c.x == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(c.y == doctest::Approx(-0.25).epsilon(1e-3));
    auto const t = threshold(f);
    for (double v : t.data()) CHECK((v == 0.0 || v == 1.0));
    CHECK(mass_in_ball(f, 1.9, {}) == doctest::Approx(f.mass()).epsilon(1e-12));
    CHECK(mass_in_ball(f, 0.8 + 2.0 * f.geometry().h, {0.5, -0.25, 0.0}) == doctest::Approx(f.mass()).epsilon(1e-12));
    CHECK(mass_in_ball(f, 0.4, {0.5, -0.25, 0.0}) == doctest::Approx(4.0 * pi / 3.0 * 0.064).epsilon(0.01));
}
