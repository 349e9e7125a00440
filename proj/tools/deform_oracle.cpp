// Prints the estimate ratios lhs/rhs of the radial stretch over the seeded
// shell sets; the bands in DeformBands are these extremes with a margin.
//
//   deform_oracle [n_cells=128] [sets=50] [lambda=0.05] [seed=1]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "nlip/deformation.hpp"

int main(int argc, char** argv) {
    using namespace nlip;
    int const n = argc > 1 ? std::atoi(argv[1]) : 128;
    int const sets = argc > 2 ? std::atoi(argv[2]) : 50;
    double const lambda = argc > 3 ? std::atof(argv[3]) : 0.05;
    std::uint64_t const seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;

    auto const g = grid::GridGeometry::centered_cube(n, 2.5);
    deform::StretchParams const p{1.0, lambda};
    double lo[4], hi[4];
    std::fill(lo, lo + 4, std::numeric_limits<double>::infinity());
    std::fill(hi, hi + 4, -std::numeric_limits<double>::infinity());
    std::printf("set,volume,perimeter,potential,coulomb\n");
    for (int s = 0; s < sets; ++s) {
        auto const rep = deform::verify_deform_estimates(deform::random_shell_set(g, p.R, seed, s), p);
        double const r[4] = {rep.volume.ratio(), rep.perimeter.ratio(), rep.potential.ratio(), rep.coulomb.ratio()};
        for (int i = 0; i < 4; ++i) {
            lo[i] = std::min(lo[i], r[i]);
            hi[i] = std::max(hi[i], r[i]);
        }
        std::printf("%d,%.6f,%.6f,%.6f,%.6f\n", s, r[0], r[1], r[2], r[3]);
        std::fflush(stdout);
    }
    char const* names[4] = {"volume", "perimeter", "potential", "coulomb"};
    for (int i = 0; i < 4; ++i) std::printf("# %s ratio in [%.6f, %.6f]\n", names[i], lo[i], hi[i]);
}
