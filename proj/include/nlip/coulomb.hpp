#pragma once
// Free-space Coulomb potentials on a grid by zero-padded FFT convolution with
// the sampled 1/|x| kernel, plus the Coulomb norm and its duality pairing.

#include <memory>
#include <span>
#include <vector>

#include "nlip/grid.hpp"

namespace nlip::grid {

/// Self-interaction of a cell: the kernel at zero displacement is g0 / h.
/// Calibrated by tools/calibrate_g0 so that a rasterized ball of radius 10h
/// reproduces (16 pi^2/15)(10h)^5. Larger than the exact cube average of
/// 1/|x| (2.3800772) because it also absorbs the midpoint-rule deficit of the
/// nearest-neighbour kernel values.
inline constexpr double kSelfTermG0 = 3.7272287;

/// Holds FFTW plans and the kernel spectrum for one grid geometry. Not
/// thread-safe: each thread needs its own solver.
class CoulombSolver {
public:
    explicit CoulombSolver(GridGeometry const& geom, double g0 = kSelfTermG0);
    ~CoulombSolver();
    CoulombSolver(CoulombSolver&&) noexcept;
    CoulombSolver& operator=(CoulombSolver&&) noexcept;

    GridGeometry const& geometry() const { return geom_; }
    double g0() const { return g0_; }

    /// out_i = h^3 sum_j G(x_i - x_j) in_j.
    void apply(std::span<double const> in, std::span<double> out) const;
    std::vector<double> apply(std::span<double const> in) const;

    /// Kernel value at a lattice displacement (in cells).
    double kernel(int di, int dj, int dk) const;

private:
    struct Impl;
    GridGeometry geom_;
    double g0_;
    std::unique_ptr<Impl> impl_;
};

/// Number of threads for FFT plans created afterwards (default 1).
void set_fft_threads(int n);

/// Solver cached per (geometry, g0); cheap to call repeatedly.
CoulombSolver const& solver_for(GridGeometry const& geom, double g0 = kSelfTermG0);

ScalarField coulomb_potential(GridField const& field);
ScalarField coulomb_potential(ScalarField const& f);

/// (1/2) h^3 sum rho * potential, including the cell self-terms.
double coulomb_self_energy(GridField const& field);

/// h^3 sum_i a_i (K b)_i.
double coulomb_pairing(ScalarField const& a, ScalarField const& b);

/// ||f_pos - f_neg||_C. Throws NegativeNormSquared if the quadratic form is
/// negative beyond round-off.
double coulomb_norm(GridField const& f_pos, GridField const& f_neg);
double coulomb_norm(ScalarField const& f);

enum class DirichletMode {
    /// Central differences, psi taken as zero beyond the box.
    CentralDifference,
    /// The seminorm dual to the discrete Coulomb form, 4 pi <psi, K^{-1} psi>.
    /// Cauchy-Schwarz makes the pairing inequality exact on the grid, with
    /// equality for psi proportional to the potential of f.
    CoulombDual,
};

/// Discrete Dirichlet energy of psi under the given discretization.
double dirichlet_energy(ScalarField const& psi, DirichletMode mode);

struct DualityResult {
    double lhs = 0.0;  // h^3 sum f psi
    double rhs = 0.0;  // (4 pi)^{-1/2} ||f||_C (Dirichlet energy)^{1/2}
    bool holds(double tol) const { return lhs <= rhs + tol; }
};

DualityResult duality_check(ScalarField const& f, ScalarField const& psi,
                            DirichletMode mode = DirichletMode::CentralDifference);

} // namespace nlip::grid
