#include "nlip/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "nlip/analytic.hpp"
#include "nlip/coulomb.hpp"
#include "nlip/deformation.hpp"
#include "nlip/error.hpp"
#include "nlip/grid_energy.hpp"
#include "nlip/isop.hpp"
#include "nlip/minimizer.hpp"
#include "nlip/screening.hpp"

namespace nlip::cli {

using json = nlohmann::json;

namespace {

struct Globals {
    std::string config;
    std::string out;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

std::string utc_now() {
    auto const t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(std::filesystem::path const& path, std::string const& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
    f << text;
    if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

/// Sends data to --out (plus a manifest next to it) or to stdout.
void emit(Globals const& g, std::ostream& out, std::string const& text, RunManifest const& m) {
    if (g.out.empty()) {
        out << text;
        return;
    }
    write_text(g.out, text);
    write_text(manifest_path(g.out), manifest_json(m));
}

RunConfig load(Globals const& g) {
    if (g.config.empty()) throw Error(ErrorKind::InvalidConfig, "--config is required");
    auto cfg = load_config(g.config);
    if (g.seed) cfg.params.seed = *g.seed;
    return cfg;
}

RunManifest manifest(std::string sub, std::uint64_t hash, std::uint64_t seed) {
    RunManifest m;
    m.subcommand = std::move(sub);
    m.params_hash = hash;
    m.seed = seed;
    m.started_at = utc_now();
    return m;
}

std::uint64_t options_hash(json const& options) { return fnv1a64(options.dump()); }

json breakdown_json(EnergyBreakdown const& e) {
    return {{"perimeter", e.perimeter}, {"coulomb_self", e.coulomb_self}, {"attraction", e.attraction},
            {"total", e.total}};
}

json report_json(ScreeningReport const& r) {
    return {{"probe_radius", r.probe_radius}, {"min_phi", r.min_phi}, {"z_eff", r.z_eff},
            {"surplus_charge", r.surplus_charge}, {"screened", r.screened}};
}

json closeball_json(screening::CloseballDiagnostics const& c) {
    return {{"missing_inside", c.missing_inside}, {"excess_in_2RZ", c.excess_in_2RZ},
            {"coulomb_dist", c.coulomb_dist}, {"bound", c.bound}};
}

json pair_json(deform::EstimatePair const& e) {
    return {{"lhs", e.lhs}, {"rhs", e.rhs}, {"ratio", e.ratio()}, {"band_lo", e.band_lo},
            {"band_hi", e.band_hi}, {"within", e.within}};
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("nlip", sink);
    log->set_pattern("[%l] %v");
    auto level = spdlog::level::err;
    if (char const* env = std::getenv("NLIP_LOG")) {
        std::string const v = env;
        if (v == "info") level = spdlog::level::info;
        else if (v == "debug") level = spdlog::level::debug;
    }
    log->set_level(level);
    return log;
}

} // namespace

std::string manifest_json(RunManifest const& m) {
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.params_hash));
    json j = {{"subcommand", m.subcommand}, {"params_hash", hash}, {"seed", m.seed},
              {"started_at", m.started_at}, {"artifact_version", m.artifact_version}};
    return j.dump(2) + "\n";
}

std::filesystem::path manifest_path(std::filesystem::path const& output) {
    auto p = output;
    p += ".manifest.json";
    return p;
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);
    Globals g;
    CLI::App app{"Numerical laboratory for the liquid drop model with a nucleus", "nlip"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--out", g.out, "output file (stdout when omitted)");
    app.add_option("--threads", g.threads, "worker threads for FFTs")->check(CLI::Range(1, 1024));
    app.add_option("--seed", g.seed, "seed, overrides the config");

    // energy
    std::string energy_field;
    auto* energy = app.add_subcommand("energy", "energy breakdown of a ball/shell config or a field dump");
    energy->add_option("--field", energy_field, "NLIPFLD1 dump for grid mode");

    // scan-split
    std::vector<double> z_list;
    auto* scan = app.add_subcommand("scan-split", "splitting threshold V* per Z");
    scan->add_option("--z-list", z_list, "comma-separated nucleus charges")->delimiter(',');

    // screen
    std::string screen_field;
    std::vector<double> radii;
    double r_min = 1.5, r_max = 0.0;
    int r_steps = 12, samples = 64, shell_samples = 12;
    std::string screen_csv;
    auto* screen = app.add_subcommand("screen", "screening radius scan");
    screen->add_option("--field", screen_field, "NLIPFLD1 dump for grid mode");
    screen->add_option("--radii", radii, "comma-separated probe radii (> 1, increasing)")->delimiter(',');
    screen->add_option("--r-min", r_min, "smallest probe radius");
    screen->add_option("--r-max", r_max, "largest probe radius (default from the body size)");
    screen->add_option("--r-steps", r_steps, "number of radii")->check(CLI::Range(1, 100000));
    screen->add_option("--samples", samples, "points per probe ball");
    screen->add_option("--shell-samples", shell_samples, "probe centers per radius");
    screen->add_option("--csv", screen_csv, "CSV of (r, min_phi) per radius");

    // isop-sample
    int isop_n = 0;
    grid::IsopOptions isop_opts;
    auto* isop = app.add_subcommand("isop-sample", "perimeter excess and gamma of random near-balls");
    isop->add_option("--n", isop_n, "number of samples")->required()->check(CLI::Range(1, 100000000));
    isop->add_option("--amplitude", isop_opts.amplitude_max, "largest degree-2 amplitude");
    isop->add_option("--shift", isop_opts.shift_max, "largest translation");

    // minimize
    minimizer::MinimizerParams mp;
    double eps_cells = 2.0;
    std::string init_kind = "centered_ball";
    std::string init_file;
    auto* mini = app.add_subcommand("minimize", "relaxed volume-constrained minimization");
    mini->add_option("--grid", mp.grid_n, "cells per side");
    mini->add_option("--box", mp.box_side, "box side (default max(3, 3 R_V))");
    mini->add_option("--eps-cells", eps_cells, "interface width in cells");
    mini->add_option("--max-iters", mp.max_iters, "iteration cap");
    mini->add_option("--step", mp.step, "initial descent step");
    mini->add_option("--stall-tol", mp.stall_tol, "relative decrease per 100 iterations that counts as stalled");
    mini->add_option("--init", init_kind, "centered_ball | random_blob | from_file");
    mini->add_option("--init-file", init_file, "field dump for --init from_file");

    // deform-check
    std::string deform_field;
    deform::StretchParams sp{1.0, 0.05};
    auto* dcheck = app.add_subcommand("deform-check", "radial stretch estimates on a field dump");
    dcheck->add_option("--field", deform_field, "NLIPFLD1 dump supported in the annulus")->required();
    dcheck->add_option("--lambda", sp.lambda, "stretch parameter");
    dcheck->add_option("--R", sp.R, "outer radius of the annulus");

    // potential
    double pot_z = 0.0, pot_rmax = 0.0;
    int pot_steps = 200;
    auto* pot = app.add_subcommand("potential", "u(r) of the ball B_{R_Z} against the nucleus");
    pot->add_option("--z", pot_z, "nucleus charge")->required();
    pot->add_option("--r-max", pot_rmax, "largest radius")->required();
    pot->add_option("--steps", pot_steps, "log-spaced radii")->check(CLI::Range(2, 10000000));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return exit_ok;
    } catch (CLI::CallForAllHelp const&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }

    try {
        if (g.threads > 1) grid::set_fft_threads(g.threads);

        if (energy->parsed()) {
            auto const cfg = load(g);
            json j;
            if (!energy_field.empty()) {
                auto const field = grid::read_field(energy_field);
                j = breakdown_json(grid::grid_energy(field, cfg.params));
                j["mode"] = "grid";
            } else if (!cfg.shells.empty()) {
                auto const body = screening::Body::from(cfg.balls, cfg.shells);
                j = breakdown_json(screening::body_energy(body, cfg.params.Z));
                j["mode"] = "analytic";
            } else {
                j = breakdown_json(analytic::union_energy(cfg.balls, cfg.params));
                j["mode"] = "analytic";
            }
            log->info("energy total {}", j["total"].get<double>());
            emit(g, out, j.dump(2) + "\n", manifest("energy", params_hash(cfg), cfg.params.seed));
            return exit_ok;
        }

        if (scan->parsed()) {
            for (double z : z_list)
                if (!(z > 0.0) || !std::isfinite(z)) throw Error(ErrorKind::InvalidParams, "every Z must be > 0");
            std::ostringstream csv;
            csv << "Z,V_star,tau,found\n";
            for (double z : z_list) {
                try {
                    auto const row = analytic::split_threshold(z);
                    csv << num(row.Z) << ',' << num(row.V_star) << ',' << num(row.tau) << ",1\n";
                    log->info("Z={} tau={}", z, row.tau);
                } catch (Error const& e) {
                    if (e.kind() != ErrorKind::NoThresholdFound) throw;
                    csv << num(z) << ",nan,nan,0\n";
                    log->info("Z={} no threshold", z);
                }
            }
            json const opts = {{"z_list", z_list}};
            emit(g, out, csv.str(), manifest("scan-split", options_hash(opts), g.seed.value_or(0)));
            return exit_ok;
        }

        if (screen->parsed()) {
            auto const cfg = load(g);
            screening::ProbeSpec probe_spec;
            probe_spec.samples_per_ball = samples;
            probe_spec.shell_samples = shell_samples;
            probe_spec.seed = cfg.params.seed;
            probe_spec.validate();
            std::optional<grid::GridField> field;
            std::optional<screening::Body> body;
            if (!screen_field.empty())
                field = grid::read_field(screen_field);
            else
                body = screening::Body::from(cfg.balls, cfg.shells);
            if (radii.empty()) {
                double hi = r_max;
                if (!(hi > 0.0)) {
                    double extent = derive_constants(cfg.params).R_Z;
                    if (body) {
                        for (auto const& s : body->shells) extent = std::max(extent, s.outer);
                        for (auto const& b : body->balls) extent = std::max(extent, norm(b.center) + b.radius);
                    } else {
                        auto const lo = field->geometry().box_lo(), top = field->geometry().box_hi();
                        extent = std::min({-lo.x, -lo.y, -lo.z, top.x, top.y, top.z}) - 1.0 - field->geometry().h;
                    }
                    hi = body ? std::max(r_min + 1.0, extent + 2.0) : extent;
                }
                if (!(hi > r_min)) throw Error(ErrorKind::InvalidParams, "--r-max must exceed --r-min");
                for (int i = 0; i < r_steps; ++i)
                    radii.push_back(r_steps == 1 ? hi : r_min + (hi - r_min) * i / (r_steps - 1));
            }
            auto const scan_result = body ? screening::find_screening_radius(*body, cfg.params, radii, probe_spec)
                                          : screening::find_screening_radius(*field, cfg.params, radii, probe_spec);
            json j = report_json(scan_result.report);
            j["closeball"] = closeball_json(body ? screening::closeball_diagnostics(*body, cfg.params)
                                                 : screening::closeball_diagnostics(*field, cfg.params));
            j["mode"] = body ? "analytic" : "grid";
            auto const m = manifest("screen", params_hash(cfg), cfg.params.seed);
            if (!screen_csv.empty()) {
                std::ostringstream csv;
                csv << "r,min_phi\n";
                for (auto const& [r, phi] : scan_result.per_radius) csv << num(r) << ',' << num(phi) << '\n';
                write_text(screen_csv, csv.str());
                write_text(manifest_path(screen_csv), manifest_json(m));
            }
            emit(g, out, j.dump(2) + "\n", m);
            return exit_ok;
        }

        if (isop->parsed()) {
            std::uint64_t const seed = g.seed ? *g.seed : (g.config.empty() ? 0 : load(g).params.seed);
            auto const samples_out = grid::isop_sample(isop_n, seed, isop_opts);
            std::ostringstream csv;
            csv << "perimeter_excess,gamma,gamma_centered\n";
            for (auto const& s : samples_out)
                csv << num(s.perimeter_excess) << ',' << num(s.gamma) << ',' << num(s.gamma_centered) << '\n';
            json const opts = {{"n", isop_n}, {"amplitude", isop_opts.amplitude_max}, {"shift", isop_opts.shift_max},
                               {"seed", seed}};
            emit(g, out, csv.str(), manifest("isop-sample", options_hash(opts), seed));
            if (!g.out.empty()) {
                auto const sum = grid::summarize_isop(samples_out);
                json j = {{"counted", sum.counted}, {"c_isop", sum.counted > 0 ? json(sum.c_isop) : json(nullptr)},
                          {"counted_origin", sum.counted_origin},
                          {"min_ratio_origin", sum.counted_origin > 0 ? json(sum.min_ratio_origin) : json(nullptr)},
                          {"min_excess", sum.min_excess}};
                out << j.dump(2) << "\n";
            }
            return exit_ok;
        }

        if (mini->parsed()) {
            auto const cfg = load(g);
            mp.init = minimizer::parse_init(init_kind);
            mp.init_path = init_file;
            if (mp.init == minimizer::InitKind::from_file && init_file.empty())
                throw Error(ErrorKind::InvalidConfig, "--init from_file needs --init-file");
            if (!(eps_cells > 0.0)) throw Error(ErrorKind::InvalidParams, "--eps-cells must be > 0");
            if (mp.init != minimizer::InitKind::from_file) {
                mp.validate(mp.geometry(cfg.params.V).h);
                mp.epsilon = eps_cells * mp.geometry(cfg.params.V).h;
            } else {
                mp.epsilon = eps_cells * grid::read_field(init_file).geometry().h;
            }
            log->info("minimize grid {} eps {} init {}", mp.grid_n, mp.epsilon, init_kind);
            auto const res = minimizer::minimize(cfg.params, mp);
            auto const sharp = grid::threshold(res.field);
            double const vol = sharp.mass();
            double const ratio = vol > 0.0 ? grid::isoperimetric_ratio(grid::perimeter_estimate(sharp), vol) : 0.0;
            Vec3 const com = grid::center_of_mass(sharp);
            json j = {{"energy", breakdown_json(res.energy)},
                      {"iterations", res.iterations},
                      {"converged", res.converged},
                      {"isoperimetric_ratio", ratio},
                      {"center_of_mass", {com.x, com.y, com.z}},
                      {"mass", res.field.mass()},
                      {"threshold_volume", vol},
                      {"epsilon", res.epsilon},
                      {"h", res.field.geometry().h},
                      {"grid", res.field.geometry().dims}};
            auto const m = manifest("minimize", params_hash(cfg), cfg.params.seed);
            std::filesystem::path const dump = std::filesystem::path(g.out.empty() ? "minimize.nlipfld" : g.out);
            grid::write_field(dump, res.field.geometry(), res.field.data());
            write_text(manifest_path(dump), manifest_json(m));
            auto summary = dump;
            summary += ".summary.json";
            write_text(summary, j.dump(2) + "\n");
            out << j.dump(2) << "\n";
            return exit_ok;
        }

        if (dcheck->parsed()) {
            auto const field = grid::read_field(deform_field);
            auto const rep = deform::verify_deform_estimates(field, sp);
            json j = {{"R", sp.R},
                      {"lambda", sp.lambda},
                      {"volume", pair_json(rep.volume)},
                      {"perimeter", pair_json(rep.perimeter)},
                      {"potential", pair_json(rep.potential)},
                      {"coulomb", pair_json(rep.coulomb)},
                      {"cap_area", rep.cap_area},
                      {"all_within", rep.all_within()},
                      {"bands_note", "empirical bands from the seeded oracle run"}};
            json const opts = {{"field", deform_field}, {"lambda", sp.lambda}, {"R", sp.R}};
            emit(g, out, j.dump(2) + "\n", manifest("deform-check", options_hash(opts), g.seed.value_or(0)));
            return exit_ok;
        }

        if (pot->parsed()) {
            if (!(pot_z > 0.0) || !std::isfinite(pot_z)) throw Error(ErrorKind::InvalidParams, "--z must be > 0");
            if (!(pot_rmax > 0.0) || !std::isfinite(pot_rmax)) throw Error(ErrorKind::InvalidParams, "--r-max must be > 0");
            double const rz = radius_for_volume(pot_z);
            double const lo = pot_rmax * 1e-3;
            std::vector<double> rs;
            for (int i = 0; i < pot_steps; ++i) rs.push_back(lo * std::pow(pot_rmax / lo, double(i) / (pot_steps - 1)));
            rs.back() = pot_rmax;
            if (rz > lo && rz < pot_rmax) rs.push_back(rz);
            std::sort(rs.begin(), rs.end());
            rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
            std::ostringstream csv;
            csv << "r,u\n";
            for (double r : rs) csv << num(r) << ',' << num(analytic::potential_u(r, pot_z)) << '\n';
            json const opts = {{"z", pot_z}, {"r_max", pot_rmax}, {"steps", pot_steps}};
            emit(g, out, csv.str(), manifest("potential", options_hash(opts), g.seed.value_or(0)));
            return exit_ok;
        }
    } catch (Error const& e) {
        err << "error: " << e.what() << "\n";
        return e.is_config_error() ? exit_config : exit_runtime;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_ok;
}

} // namespace nlip::cli
