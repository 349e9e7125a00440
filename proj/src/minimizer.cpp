#include "nlip/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include <fftw3.h>

#include "nlip/analytic.hpp"
#include "nlip/coulomb.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"
#include "nlip/rng.hpp"

namespace nlip::minimizer {

namespace {

/// Solves (c0 + c1 L) x = b with L the 7-point negative Laplacian, zero
/// Dirichlet data beyond the box, diagonalized by the type-I sine transform.
class DirichletSolver {
public:
    explicit DirichletSolver(grid::GridGeometry const& g) : dims_(g.dims), h_(g.h) {
        n_ = g.size();
        buf_ = fftw_alloc_real(n_);
        plan_ = fftw_plan_r2r_3d(dims_[2], dims_[1], dims_[0], buf_, buf_, FFTW_RODFT00, FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE);
        for (int a = 0; a < 3; ++a) {
            eig_[a].resize(dims_[a]);
            for (int k = 0; k < dims_[a]; ++k)
                eig_[a][k] = (2.0 - 2.0 * std::cos(pi * (k + 1) / (dims_[a] + 1))) / (h_ * h_);
        }
        norm_ = 1.0 / (8.0 * (dims_[0] + 1.0) * (dims_[1] + 1.0) * (dims_[2] + 1.0));
    }
    ~DirichletSolver() {
        fftw_destroy_plan(plan_);
        fftw_free(buf_);
    }
    DirichletSolver(DirichletSolver const&) = delete;
    DirichletSolver& operator=(DirichletSolver const&) = delete;

    void solve(double c0, double c1, std::vector<double>& x) {
        std::copy(x.begin(), x.end(), buf_);
        fftw_execute(plan_);
        std::size_t idx = 0;
        for (int k = 0; k < dims_[2]; ++k)
            for (int j = 0; j < dims_[1]; ++j)
                for (int i = 0; i < dims_[0]; ++i, ++idx)
                    buf_[idx] *= norm_ / (c0 + c1 * (eig_[0][i] + eig_[1][j] + eig_[2][k]));
        fftw_execute(plan_);
        std::copy(buf_, buf_ + n_, x.begin());
    }

private:
    std::array<int, 3> dims_;
    double h_;
    std::size_t n_;
    double* buf_;
    fftw_plan plan_;
    std::vector<double> eig_[3];
    double norm_;
};

/// -Δ_h rho with rho = 0 beyond the box.
void neg_laplacian(grid::GridGeometry const& g, std::vector<double> const& rho, std::vector<double>& out) {
    int const nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    double const inv_h2 = 1.0 / (g.h * g.h);
    std::size_t const sy = nx, sz = std::size_t(nx) * ny;
    out.assign(rho.size(), 0.0);
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        double nb = 0.0;
        if (i > 0) nb += rho[idx - 1];
        if (i + 1 < nx) nb += rho[idx + 1];
        if (j > 0) nb += rho[idx - sy];
        if (j + 1 < ny) nb += rho[idx + sy];
        if (k > 0) nb += rho[idx - sz];
        if (k + 1 < nz) nb += rho[idx + sz];
        out[idx] = (6.0 * rho[idx] - nb) * inv_h2;
    });
}

double mm_value(grid::GridGeometry const& g, std::vector<double> const& rho, double eps) {
    int const nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    std::size_t const sy = nx, sz = std::size_t(nx) * ny;
    double grad2 = 0.0, well = 0.0;
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        double const r = rho[idx];
        well += double_well(r);
        // Forward faces, plus the faces to the zero exterior on the low side.
        double const dx = (i + 1 < nx ? rho[idx + 1] : 0.0) - r;
        double const dy = (j + 1 < ny ? rho[idx + sy] : 0.0) - r;
        double const dz = (k + 1 < nz ? rho[idx + sz] : 0.0) - r;
        grad2 += dx * dx + dy * dy + dz * dz;
        if (i == 0) grad2 += r * r;
        if (j == 0) grad2 += r * r;
        if (k == 0) grad2 += r * r;
    });
    double const h3 = g.cell_volume();
    return h3 / c_W * (0.5 * eps * grad2 / (g.h * g.h) + well / eps);
}

struct State {
    std::vector<double> rho;
    std::vector<double> potential;  // K rho
    EnergyBreakdown energy;
};

EnergyBreakdown evaluate(grid::GridGeometry const& g, std::vector<double> const& rho, std::vector<double> const& pot,
                         std::vector<double> const& nucleus, double Z, double eps) {
    double const h3 = g.cell_volume();
    double self = 0.0, attr = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        self += rho[i] * pot[i];
        attr += rho[i] * nucleus[i];
    }
    return EnergyBreakdown::make(mm_value(g, rho, eps), 0.5 * h3 * self, Z * h3 * attr);
}

void gradient(grid::GridGeometry const& g, std::vector<double> const& rho, std::vector<double> const& pot,
              std::vector<double> const& nucleus, double Z, double eps, std::vector<double>& out) {
    neg_laplacian(g, rho, out);
    for (std::size_t i = 0; i < rho.size(); ++i)
        out[i] = (eps * out[i] + double_well_prime(rho[i]) / eps) / c_W + pot[i] - Z * nucleus[i];
}

} // namespace

InitKind parse_init(std::string const& name) {
    if (name == "centered_ball") return InitKind::centered_ball;
    if (name == "random_blob") return InitKind::random_blob;
    if (name == "from_file") return InitKind::from_file;
    throw Error(ErrorKind::InvalidParams, "unknown init kind '" + name + "'");
}

std::string to_string(InitKind kind) {
    switch (kind) {
    case InitKind::centered_ball: return "centered_ball";
    case InitKind::random_blob: return "random_blob";
    case InitKind::from_file: return "from_file";
    }
    return "unknown";
}

grid::GridGeometry MinimizerParams::geometry(double V) const {
    double const side = box_side > 0.0 ? box_side : std::max(3.0, 3.0 * radius_for_volume(V));
    return grid::GridGeometry::centered_cube(grid_n, side);
}

void MinimizerParams::validate(double h) const {
    if (grid_n < 8) throw Error(ErrorKind::InvalidParams, "grid must have at least 8 cells per side");
    if (resolved_epsilon(h) < 1.5 * h * (1.0 - 1e-12))
        throw Error(ErrorKind::InvalidParams, "epsilon must be at least 1.5 h");
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidParams, "step must be > 0");
    if (max_iters < 1) throw Error(ErrorKind::InvalidParams, "max_iters must be >= 1");
    if (!(stall_tol >= 0.0)) throw Error(ErrorKind::InvalidParams, "stall_tol must be >= 0");
}

double modica_mortola(grid::ScalarField const& rho, double eps) { return mm_value(rho.geom, rho.values, eps); }

double relaxed_energy_value(grid::ScalarField const& rho, ModelParams const& params, double eps) {
    auto const& g = rho.geom;
    auto const pot = grid::solver_for(g).apply(rho.values);
    auto const nucleus = grid::inverse_distance_kernel(g);
    return evaluate(g, rho.values, pot, nucleus, params.Z, eps).total;
}

std::vector<double> relaxed_gradient(grid::ScalarField const& rho, ModelParams const& params, double eps) {
    auto const& g = rho.geom;
    auto const pot = grid::solver_for(g).apply(rho.values);
    auto const nucleus = grid::inverse_distance_kernel(g);
    std::vector<double> out;
    gradient(g, rho.values, pot, nucleus, params.Z, eps, out);
    return out;
}

EnergyBreakdown relaxed_energy(grid::GridField const& field, ModelParams const& params, double eps) {
    auto const& g = field.geometry();
    std::vector<double> rho(field.data().begin(), field.data().end());
    auto const pot = grid::solver_for(g).apply(rho);
    auto const nucleus = grid::inverse_distance_kernel(g);
    return evaluate(g, rho, pot, nucleus, params.Z, eps);
}

EnergyBreakdown relaxed_energy(grid::GridField const& field, ModelParams const& params, MinimizerParams const& mp) {
    return relaxed_energy(field, params, mp.resolved_epsilon(field.geometry().h));
}

void project_mass(std::vector<double>& rho, double cell_volume, double V) {
    double const target = V / cell_volume;
    auto mass_at = [&](double mu) {
        double s = 0.0;
        for (double r : rho) s += std::clamp(r + mu, 0.0, 1.0);
        return s;
    };
    if (target > double(rho.size())) throw Error(ErrorKind::BoxTooSmall, "volume exceeds the box");
    auto const [mn, mx] = std::minmax_element(rho.begin(), rho.end());
    double lo = -*mx, hi = 1.0 - *mn;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        double const mid = 0.5 * (lo + hi);
        (mass_at(mid) < target ? lo : hi) = mid;
    }
    double const mu = 0.5 * (lo + hi);
    double s = 0.0;
    std::size_t free = 0;
    for (double& r : rho) {
        r = std::clamp(r + mu, 0.0, 1.0);
        s += r;
        if (r > 0.0 && r < 1.0) ++free;
    }
    // Spread the bisection residual over the unclipped cells.
    if (free > 0) {
        double const fix = (target - s) / double(free);
        for (double& r : rho)
            if (r > 0.0 && r < 1.0) r = std::clamp(r + fix, 0.0, 1.0);
    }
}

grid::GridField tanh_ball(grid::GridGeometry const& g, double R, double eps, Vec3 const& center) {
    std::vector<double> rho(g.size());
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        double const s = R - norm(g.center(i, j, k) - center);
        rho[idx] = 0.5 * (1.0 + std::tanh(s / (std::sqrt(2.0) * eps)));
    });
    return grid::GridField(g, std::move(rho));
}

grid::GridField random_blob(grid::GridGeometry const& g, double V, double eps, std::uint64_t seed) {
    CounterRng rng(seed, 0xb10bULL);
    double const R = radius_for_volume(V);
    int const n = 3 + int(rng.uniform() * 4.0);
    std::vector<Ball> parts;
    for (int i = 0; i < n; ++i) parts.push_back({rng.in_unit_ball() * (0.5 * R), rng.uniform(0.4, 0.8) * R});
    std::vector<double> rho(g.size());
    grid::for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        Vec3 const x = g.center(i, j, k);
        double d = std::numeric_limits<double>::infinity();
        for (auto const& b : parts) d = std::min(d, norm(x - b.center) - b.radius);
        rho[idx] = 0.5 * (1.0 + std::tanh(-d / (std::sqrt(2.0) * eps)));
    });
    project_mass(rho, g.cell_volume(), V);
    return grid::GridField(g, std::move(rho));
}

MinimizeResult minimize(ModelParams const& params, MinimizerParams const& mp) {
    params.validate();
    double const V = params.V, Z = params.Z;

    grid::GridField init;
    if (mp.init == InitKind::from_file) {
        init = grid::read_field(mp.init_path);
    }
    auto const g = mp.init == InitKind::from_file ? init.geometry() : mp.geometry(V);
    double const eps = mp.resolved_epsilon(g.h);
    mp.validate(g.h);
    double const box_volume = double(g.size()) * g.cell_volume();
    if (V > 0.5 * box_volume) throw Error(ErrorKind::BoxTooSmall, "V exceeds half the box volume");

    MinimizeResult res;
    res.epsilon = eps;
    if (V == 0.0) {
        res.field = grid::GridField(g);
        res.converged = true;
        return res;
    }
    switch (mp.init) {
    case InitKind::centered_ball: init = tanh_ball(g, radius_for_volume(V), eps); break;
    case InitKind::random_blob: init = random_blob(g, V, eps, params.seed); break;
    case InitKind::from_file: break;
    }

    auto const& solver = grid::solver_for(g);
    auto const nucleus = grid::inverse_distance_kernel(g);
    DirichletSolver dirichlet(g);

    State cur;
    cur.rho.assign(init.data().begin(), init.data().end());
    project_mass(cur.rho, g.cell_volume(), V);
    cur.potential = solver.apply(cur.rho);
    cur.energy = evaluate(g, cur.rho, cur.potential, nucleus, Z, eps);

    State best = cur;
    double const a = eps / c_W;
    double const stab = 2.0 / (c_W * eps);  // bounds the curvature of W / (c_W eps)
    double tau = mp.step;
    double const tau_min = mp.step * 1e-10;
    int rising = 0;
    std::vector<double> grad, trial;

    for (int it = 1; it <= mp.max_iters; ++it) {
        res.iterations = it;
        gradient(g, cur.rho, cur.potential, nucleus, Z, eps, grad);
        for (double& v : grad) v *= tau;
        dirichlet.solve(1.0 + tau * stab, tau * a, grad);
        trial.resize(cur.rho.size());
        double move = 0.0;
        for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = cur.rho[i] - grad[i];
        project_mass(trial, g.cell_volume(), V);
        for (std::size_t i = 0; i < trial.size(); ++i) move = std::max(move, std::abs(trial[i] - cur.rho[i]));

        auto pot = solver.apply(trial);
        auto const e = evaluate(g, trial, pot, nucleus, Z, eps);
        if (!std::isfinite(e.total)) throw Error(ErrorKind::Diverged, "energy is not finite");

        double const slack = 1e-13 * std::abs(cur.energy.total);
        if (e.total <= cur.energy.total + slack) {
            cur.rho.swap(trial);
            cur.potential = std::move(pot);
            cur.energy = e;
            rising = 0;
            tau = std::min(tau * 1.5, mp.step * 16.0);
            if (cur.energy.total < best.energy.total) best = cur;
        } else if (tau > tau_min) {
            tau *= 0.5;
        } else if (move < 1e-12) {
            res.converged = true;
        } else if (++rising >= 10) {
            throw Error(ErrorKind::Diverged, "energy rose for 10 consecutive steps at the minimal step");
        }
        res.best_history.push_back(best.energy.total);
        if (res.converged) break;
        if (move < 1e-11 && e.total <= cur.energy.total + slack) {
            res.converged = true;
            break;
        }
        if (it > 100) {
            double const old = res.best_history[res.best_history.size() - 101];
            double const now = res.best_history.back();
            if ((old - now) <= mp.stall_tol * std::abs(now)) {
                res.converged = true;
                break;
            }
        }
    }
    res.field = grid::GridField(g, std::move(best.rho));
    res.energy = best.energy;
    return res;
}

OptimalityProbe local_optimality_probe(BallConfig const& config, ModelParams const& params, double delta) {
    validate_ball_config(config);
    if (config.balls.empty()) throw Error(ErrorKind::InvalidParams, "config has no balls");
    std::size_t outer = 0;
    for (std::size_t i = 1; i < config.balls.size(); ++i) {
        auto const& b = config.balls[i];
        auto const& o = config.balls[outer];
        if (norm(b.center) + b.radius > norm(o.center) + o.radius) outer = i;
    }
    double const vol = config.balls[outer].volume();
    if (!(delta >= 0.0) || delta > vol)
        throw Error(ErrorKind::InvalidParams, "delta must lie in [0, volume of the outermost ball]");

    OptimalityProbe out;
    out.e_keep = analytic::union_energy(config, params).total;
    BallConfig shed = config;
    if (delta == vol)
        shed.balls.erase(shed.balls.begin() + std::ptrdiff_t(outer));
    else
        shed.balls[outer].radius = radius_for_volume(vol - delta);
    out.e_shed = analytic::detached_energy(shed, {delta}, params).total;
    return out;
}

} // namespace nlip::minimizer
