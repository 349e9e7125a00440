// calibrate_g0.cpp
//
// Computes the Coulomb kernel self-term g0 (G(0) = g0/h) such that the grid
// self-energy of a rasterized ball of radius 10h equals (16 pi^2/15)(10h)^5.
// The self-energy is affine in g0, so one evaluation at g0 = 0 suffices.
//
// Usage: calibrate_g0 [radius_in_cells=10]

#include <cstdio>
#include <cstdlib>

#include "nlip/analytic.hpp"
#include "nlip/coulomb.hpp"

int main(int argc, char** argv) {
    using namespace nlip;
    double const cells = argc > 1 ? std::atof(argv[1]) : 10.0;
    double const h = 1.0;
    int const n = 2 * int(cells + 4);
    auto const g = grid::GridGeometry::centered({n, n, n}, h);
    BallConfig ball{{{{0, 0, 0}, cells * h}}, 0.0};
    auto const field = grid::rasterize(ball, g);

    grid::CoulombSolver const bare(g, 0.0);
    auto const pot = bare.apply(field.data());
    double e0 = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        e0 += field[i] * pot[i];
        sq += field[i] * field[i];
    }
    e0 *= 0.5 * g.cell_volume();
    double const self_unit = 0.5 * g.cell_volume() * g.cell_volume() / h * sq;
    double const target = analytic::ball_self_coulomb(cells * h);
    double const g0 = (target - e0) / self_unit;

    std::printf("radius %.1f h, grid %d^3\n", cells, n);
    std::printf("mass %.10f (exact %.10f)\n", field.mass(), ball_volume(cells * h));
    std::printf("self-energy at g0=0: %.10f, target %.10f\n", e0, target);
    std::printf("g0 = %.7f\n", g0);
    return 0;
}
