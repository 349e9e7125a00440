#include "nlip/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

#include "nlip/error.hpp"

namespace nlip::grid {

struct CoulombSolver::Impl {
    int nx, ny, nz;  // padded dims
    int cx;          // complex length of the x axis
    std::size_t n_real = 0, n_complex = 0;
    double* real = nullptr;
    fftw_complex* spectrum = nullptr;
    fftw_plan forward = nullptr, backward = nullptr;
    // Pruned passes: only the occupied octant is transformed along x and y on
    // the way in, and only the needed octant is recovered on the way out.
    fftw_plan fx = nullptr, fy = nullptr, fz = nullptr, bz = nullptr, by = nullptr, bx = nullptr;
    std::vector<double> kernel_hat;

    Impl(int px, int py, int pz, std::array<int, 3> const& n) : nx(px), ny(py), nz(pz), cx(px / 2 + 1) {
        n_real = std::size_t(nx) * ny * nz;
        n_complex = std::size_t(nz) * ny * cx;
        real = fftw_alloc_real(n_real);
        spectrum = fftw_alloc_complex(n_complex);
        forward = fftw_plan_dft_r2c_3d(nz, ny, nx, real, spectrum, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_3d(nz, ny, nx, spectrum, real, FFTW_ESTIMATE);

        int const sy_r = nx, sz_r = nx * ny;
        int const sy_c = cx, sz_c = cx * ny;
        fftw_iodim x_dim{nx, 1, 1};
        fftw_iodim x_loops[2] = {{n[2], sz_r, sz_c}, {n[1], sy_r, sy_c}};
        fx = fftw_plan_guru_dft_r2c(1, &x_dim, 2, x_loops, real, spectrum, FFTW_ESTIMATE);
        fftw_iodim x_loops_back[2] = {{n[2], sz_c, sz_r}, {n[1], sy_c, sy_r}};
        bx = fftw_plan_guru_dft_c2r(1, &x_dim, 2, x_loops_back, spectrum, real, FFTW_ESTIMATE);

        fftw_iodim y_dim{ny, sy_c, sy_c};
        fftw_iodim y_loops[2] = {{n[2], sz_c, sz_c}, {cx, 1, 1}};
        fy = fftw_plan_guru_dft(1, &y_dim, 2, y_loops, spectrum, spectrum, FFTW_FORWARD, FFTW_ESTIMATE);
        by = fftw_plan_guru_dft(1, &y_dim, 2, y_loops, spectrum, spectrum, FFTW_BACKWARD, FFTW_ESTIMATE);

        fftw_iodim z_dim{nz, sz_c, sz_c};
        fftw_iodim z_loops[2] = {{ny, sy_c, sy_c}, {cx, 1, 1}};
        fz = fftw_plan_guru_dft(1, &z_dim, 2, z_loops, spectrum, spectrum, FFTW_FORWARD, FFTW_ESTIMATE);
        bz = fftw_plan_guru_dft(1, &z_dim, 2, z_loops, spectrum, spectrum, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fx || !fy || !fz || !bx || !by || !bz) throw Error(ErrorKind::GeometryMismatch, "FFT planning failed");
    }
    ~Impl() {
        for (fftw_plan p : {forward, backward, fx, fy, fz, bz, by, bx}) fftw_destroy_plan(p);
        fftw_free(real);
        fftw_free(spectrum);
    }
};

CoulombSolver::CoulombSolver(GridGeometry const& geom, double g0) : geom_(geom), g0_(g0) {
    geom_.validate();
    auto const& d = geom_.dims;
    impl_ = std::make_unique<Impl>(2 * d[0], 2 * d[1], 2 * d[2], d);
    auto& im = *impl_;
    std::size_t idx = 0;
    for (int c = 0; c < im.nz; ++c)
        for (int b = 0; b < im.ny; ++b)
            for (int a = 0; a < im.nx; ++a, ++idx) {
                int const di = a < d[0] ? a : a - im.nx;
                int const dj = b < d[1] ? b : b - im.ny;
                int const dk = c < d[2] ? c : c - im.nz;
                im.real[idx] = kernel(di, dj, dk);
            }
    fftw_execute(im.forward);
    im.kernel_hat.resize(im.n_complex);
    for (std::size_t i = 0; i < im.n_complex; ++i) im.kernel_hat[i] = im.spectrum[i][0];
}

CoulombSolver::~CoulombSolver() = default;
CoulombSolver::CoulombSolver(CoulombSolver&&) noexcept = default;
CoulombSolver& CoulombSolver::operator=(CoulombSolver&&) noexcept = default;

double CoulombSolver::kernel(int di, int dj, int dk) const {
    if (di == 0 && dj == 0 && dk == 0) return g0_ / geom_.h;
    return 1.0 / (geom_.h * std::sqrt(double(di * di + dj * dj + dk * dk)));
}

void CoulombSolver::apply(std::span<double const> in, std::span<double> out) const {
    if (in.size() != geom_.size() || out.size() != geom_.size())
        throw Error(ErrorKind::GeometryMismatch, "field size does not match solver grid");
    auto& im = *impl_;
    auto const& d = geom_.dims;
    for (int k = 0; k < d[2]; ++k)
        for (int j = 0; j < d[1]; ++j) {
            double* row = im.real + (std::size_t(k) * im.ny + j) * im.nx;
            std::copy_n(in.data() + geom_.index(0, j, k), d[0], row);
            std::fill(row + d[0], row + im.nx, 0.0);
        }
    std::fill(&im.spectrum[0][0], &im.spectrum[0][0] + 2 * im.n_complex, 0.0);
    fftw_execute(im.fx);
    fftw_execute(im.fy);
    fftw_execute(im.fz);
    for (std::size_t i = 0; i < im.n_complex; ++i) {
        im.spectrum[i][0] *= im.kernel_hat[i];
        im.spectrum[i][1] *= im.kernel_hat[i];
    }
    fftw_execute(im.bz);
    fftw_execute(im.by);
    fftw_execute(im.bx);
    double const scale = geom_.cell_volume() / double(im.n_real);
    for (int k = 0; k < d[2]; ++k)
        for (int j = 0; j < d[1]; ++j) {
            double const* row = im.real + (std::size_t(k) * im.ny + j) * im.nx;
            double* o = out.data() + geom_.index(0, j, k);
            for (int i = 0; i < d[0]; ++i) o[i] = row[i] * scale;
        }
}

std::vector<double> CoulombSolver::apply(std::span<double const> in) const {
    std::vector<double> out(in.size());
    apply(in, out);
    return out;
}

void set_fft_threads(int n) {
    static bool const ready = fftw_init_threads() != 0;
    if (!ready) throw Error(ErrorKind::InvalidParams, "FFT threads unavailable");
    fftw_plan_with_nthreads(std::max(1, n));
}

CoulombSolver const& solver_for(GridGeometry const& geom, double g0) {
    static std::mutex mutex;
    static std::vector<std::unique_ptr<CoulombSolver>> cache;
    constexpr std::size_t capacity = 4;
    std::lock_guard lock(mutex);
    for (std::size_t i = 0; i < cache.size(); ++i) {
        if (cache[i]->geometry() == geom && cache[i]->g0() == g0) {
            std::rotate(cache.begin(), cache.begin() + i, cache.begin() + i + 1);
            return *cache.front();
        }
    }
    if (cache.size() == capacity) cache.pop_back();
    cache.insert(cache.begin(), std::make_unique<CoulombSolver>(geom, g0));
    return *cache.front();
}

ScalarField coulomb_potential(GridField const& field) {
    auto const& g = field.geometry();
    return {g, solver_for(g).apply(field.data())};
}

ScalarField coulomb_potential(ScalarField const& f) { return {f.geom, solver_for(f.geom).apply(f.values)}; }

namespace {

double weighted_dot(GridGeometry const& g, std::span<double const> a, std::span<double const> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * g.cell_volume();
}

void require_same(GridGeometry const& a, GridGeometry const& b) {
    if (!(a == b)) throw Error(ErrorKind::GeometryMismatch, "fields live on different grids");
}

} // namespace

double coulomb_self_energy(GridField const& field) {
    auto const pot = coulomb_potential(field);
    return 0.5 * weighted_dot(field.geometry(), field.data(), pot.values);
}

double coulomb_pairing(ScalarField const& a, ScalarField const& b) {
    require_same(a.geom, b.geom);
    auto const pot = solver_for(b.geom).apply(b.values);
    return weighted_dot(a.geom, a.values, pot);
}

double coulomb_norm(ScalarField const& f) {
    auto const pot = solver_for(f.geom).apply(f.values);
    double q = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < pot.size(); ++i) {
        q += f.values[i] * pot[i];
        scale += std::abs(f.values[i] * pot[i]);
    }
    q *= f.geom.cell_volume();
    scale *= f.geom.cell_volume();
    if (q < 0.0) {
        if (q < -1e-10 * scale - 1e-300)
            throw Error(ErrorKind::NegativeNormSquared, "Coulomb quadratic form is negative: " + std::to_string(q));
        return 0.0;
    }
    return std::sqrt(q);
}

double coulomb_norm(GridField const& f_pos, GridField const& f_neg) {
    require_same(f_pos.geometry(), f_neg.geometry());
    ScalarField f = ScalarField::zeros(f_pos.geometry());
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = f_pos[i] - f_neg[i];
    return coulomb_norm(f);
}

namespace {

double central_difference_energy(ScalarField const& psi) {
    auto const& g = psi.geom;
    auto at = [&](int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i >= g.dims[0] || j >= g.dims[1] || k >= g.dims[2]) return 0.0;
        return psi.values[g.index(i, j, k)];
    };
    double s = 0.0;
    for_each_cell(g, [&](int i, int j, int k, std::size_t) {
        double const dx = at(i + 1, j, k) - at(i - 1, j, k);
        double const dy = at(i, j + 1, k) - at(i, j - 1, k);
        double const dz = at(i, j, k + 1) - at(i, j, k - 1);
        s += dx * dx + dy * dy + dz * dz;
    });
    return s * g.cell_volume() / (4.0 * g.h * g.h);
}

/// Solves K x = b by conjugate gradients in the h^3-weighted inner product.
std::vector<double> solve_kernel(GridGeometry const& g, std::span<double const> b) {
    auto const& K = solver_for(g);
    std::size_t const n = b.size();
    std::vector<double> x(n, 0.0), r(b.begin(), b.end()), p = r, Ap(n);
    double rr = weighted_dot(g, r, r);
    double const rr0 = rr;
    if (rr0 == 0.0) return x;
    for (int it = 0; it < 20000 && rr > 1e-28 * rr0; ++it) {
        K.apply(p, Ap);
        double const alpha = rr / weighted_dot(g, p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double const rr_new = weighted_dot(g, r, r);
        double const beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return x;
}

} // namespace

double dirichlet_energy(ScalarField const& psi, DirichletMode mode) {
    if (mode == DirichletMode::CentralDifference) return central_difference_energy(psi);
    auto const x = solve_kernel(psi.geom, psi.values);
    return 4.0 * pi * std::max(0.0, weighted_dot(psi.geom, psi.values, x));
}

DualityResult duality_check(ScalarField const& f, ScalarField const& psi, DirichletMode mode) {
    require_same(f.geom, psi.geom);
    DualityResult r;
    r.lhs = weighted_dot(f.geom, f.values, psi.values);
    r.rhs = coulomb_norm(f) * std::sqrt(dirichlet_energy(psi, mode)) / std::sqrt(4.0 * pi);
    return r;
}

} // namespace nlip::grid
