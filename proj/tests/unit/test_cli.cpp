#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlip/cli.hpp"
#include "nlip/deformation.hpp"
#include "nlip/grid.hpp"
#include "nlip/model.hpp"

using namespace nlip;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run nlip_run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int const code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("nlip_cli_" + std::to_string(std::hash<std::string>{}(
                                                             doctest::getContextOptions()->currentTest->m_name)));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(std::string const& name, std::string const& text = {}) const {
        auto const p = path / name;
        if (!text.empty()) std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(std::string const& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("energy subcommand") {
    TempDir t;
    auto r = nlip_run({"energy", "--config", t.file("b.json", R"({"Z":0,"V":0,"balls":[{"center":[0,0,0],"radius":1}]})")});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["total"].get<double>() == doctest::Approx(4 * pi + 16 * pi * pi / 15).epsilon(1e-14));
    CHECK(j["mode"] == "analytic");

    r = nlip_run({"--config", t.file("e.json", R"({"Z":0,"V":0})"), "energy"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["total"].get<double>() == 0.0);

    double const Z = 4 * pi / 3;
    std::ostringstream cfg;
    cfg.precision(17);
    cfg << R"({"Z":)" << Z << R"(,"V":)" << Z << R"(,"balls":[{"center":[0,0,0],"radius":1}]})";
    r = nlip_run({"energy", "--config", t.file("z.json", cfg.str())});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["total"].get<double>() == doctest::Approx(4 * pi - 8 * pi * pi / 5).epsilon(1e-13));
}

TEST_CASE("configuration errors exit with 2") {
    TempDir t;
    CHECK(nlip_run({}).code == cli::exit_config);
    CHECK(nlip_run({"frobnicate"}).code == cli::exit_config);
    CHECK(nlip_run({"energy"}).code == cli::exit_config);
    CHECK(nlip_run({"energy", "--config", t.file("missing.json")}).code == cli::exit_config);
    auto const bad = nlip_run({"energy", "--config", t.file("bad.json", R"({"Z":1,"V":1,"color":"red"})")});
    CHECK(bad.code == cli::exit_config);
    CHECK(bad.err.find("color") != std::string::npos);
    CHECK(nlip_run({"energy", "--config", t.file("junk.json", "[1,2")}).code == cli::exit_config);
    auto const overlap = t.file("o.json", R"({"Z":1,"V":1,"balls":[{"center":[3,0,0],"radius":1},{"center":[3.5,0,0],"radius":1}]})");
    CHECK(nlip_run({"energy", "--config", overlap}).code != 0);
    CHECK(nlip_run({"potential", "--z", "-2", "--r-max", "1"}).code == cli::exit_config);
    CHECK(nlip_run({"potential", "--z", "abc", "--r-max", "1"}).code == cli::exit_config);
    CHECK(nlip_run({"--threads", "0", "potential", "--z", "1", "--r-max", "1"}).code == cli::exit_config);
}

TEST_CASE("runtime errors exit with 3") {
    TempDir t;
    auto const cfg = t.file("c.json", R"({"Z":1,"V":10})");
    auto const r = nlip_run({"minimize", "--config", cfg, "--grid", "16", "--box", "2", "--out", t.file("m.fld")});
    CHECK(r.code == cli::exit_runtime);
    CHECK(r.err.find("BoxTooSmall") != std::string::npos);
}

TEST_CASE("scan-split") {
    auto r = nlip_run({"scan-split", "--z-list", "1000"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "Z,V_star,tau,found");
    CHECK(row.rfind("1000,", 0) == 0);
    double const tau = std::stod(row.substr(row.find(',', 5) + 1));
    CHECK(std::isfinite(tau));
    CHECK(row.back() == '1');

    r = nlip_run({"scan-split"});
    CHECK(r.code == 0);
    CHECK(r.out == "Z,V_star,tau,found\n");
    CHECK(nlip_run({"scan-split", "--z-list", "10,-1"}).code == cli::exit_config);
}

TEST_CASE("potential has the zero row at R_Z") {
    auto const r = nlip_run({"potential", "--z", "4.18879", "--r-max", "2"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "r,u");
    double const rz = radius_for_volume(4.18879);
    bool found = false;
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        double const rr = std::stod(line.substr(0, line.find(',')));
        double const u = std::stod(line.substr(line.find(',') + 1));
        if (std::abs(rr - rz) < 1e-12 && std::abs(u) < 1e-9) found = true;
        if (std::abs(rr - 1.0) < 1e-6) CHECK(std::abs(u) < 1e-9);
    }
    CHECK(found);
    CHECK(rows == 201);
}

TEST_CASE("isop-sample is byte identical across runs and writes a manifest") {
    TempDir t;
    auto const a = t.file("a.csv"), b = t.file("b.csv");
    REQUIRE(nlip_run({"isop-sample", "--n", "3", "--seed", "7", "--out", a}).code == 0);
    REQUIRE(nlip_run({"isop-sample", "--n", "3", "--seed", "7", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("perimeter_excess,gamma,gamma_centered\n", 0) == 0);
    auto const m = json::parse(slurp(a + ".manifest.json"));
    CHECK(m["subcommand"] == "isop-sample");
    CHECK(m["seed"] == 7);
    CHECK(m["artifact_version"] == cli::artifact_version);
    CHECK(m["params_hash"].get<std::string>().size() == 16u);
    CHECK(m["started_at"].get<std::string>().back() == 'Z');
    auto const mb = json::parse(slurp(b + ".manifest.json"));
    CHECK(m["params_hash"] == mb["params_hash"]);
}

TEST_CASE("manifest hash follows the canonical config") {
    TempDir t;
    auto const c1 = t.file("1.json", R"({"Z":1,"V":2,"balls":[{"center":[0,0,0],"radius":0.5}]})");
    auto const c2 = t.file("2.json", R"({ "V":2.0, "balls":[{"radius":0.5,"center":[0,0,0]}], "Z":1 })");
    auto const o1 = t.file("o1.json"), o2 = t.file("o2.json");
    REQUIRE(nlip_run({"energy", "--config", c1, "--out", o1}).code == 0);
    REQUIRE(nlip_run({"energy", "--config", c2, "--out", o2}).code == 0);
    CHECK(slurp(o1) == slurp(o2));
    auto const h1 = json::parse(slurp(o1 + ".manifest.json"))["params_hash"];
    auto const h2 = json::parse(slurp(o2 + ".manifest.json"))["params_hash"];
    CHECK(h1 == h2);
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(params_hash(load_config(c1))));
    CHECK(h1 == hex);
}

TEST_CASE("screen on the neutral ball") {
    TempDir t;
    double const Z = 4 * pi / 3;
    std::ostringstream cfg;
    cfg.precision(17);
    cfg << R"({"Z":)" << Z << R"(,"V":)" << Z << R"(,"balls":[{"center":[0,0,0],"radius":1}]})";
    auto const csv = t.file("s.csv");
    auto const r = nlip_run({"screen", "--config", t.file("c.json", cfg.str()), "--radii", "2,3,4", "--csv", csv});
    REQUIRE(r.code == 0);
    auto const j = json::parse(r.out);
    CHECK_FALSE(j["screened"].get<bool>());
    CHECK(std::abs(j["min_phi"].get<double>()) < 1e-9);
    CHECK(slurp(csv).rfind("r,min_phi\n2,", 0) == 0);
    CHECK(fs::exists(csv + ".manifest.json"));
}

TEST_CASE("deform-check on a field dump") {
    TempDir t;
    auto const g = grid::GridGeometry::centered_cube(32, 2.5);
    auto const f = deform::random_shell_set(g, 1.0, 1, 0);
    auto const dump = t.file("a.fld");
    grid::write_field(dump, g, f.data());
    auto const r = nlip_run({"deform-check", "--field", dump, "--lambda", "0.05"});
    REQUIRE(r.code == 0);
    auto const j = json::parse(r.out);
    for (char const* k : {"volume", "perimeter", "potential", "coulomb"}) {
        CHECK(j[k].contains("lhs"));
        CHECK(j[k].contains("rhs"));
    }
    CHECK(j["volume"]["within"].get<bool>());
    CHECK(nlip_run({"deform-check", "--field", dump, "--lambda", "0.5"}).code == cli::exit_config);
}

TEST_CASE("minimize writes dump, summary and manifest") {
    TempDir t;
    auto const cfg = t.file("c.json", R"({"Z":1,"V":1,"seed":4})");
    auto const out = t.file("m.fld");
    auto const r = nlip_run({"minimize", "--config", cfg, "--grid", "16", "--max-iters", "5", "--out", out});
    REQUIRE(r.code == 0);
    auto const field = grid::read_field(out);
    CHECK(field.geometry().dims[0] == 16);
    auto const s = json::parse(slurp(out + ".summary.json"));
    for (char const* k : {"energy", "iterations", "converged", "isoperimetric_ratio", "center_of_mass"}) CHECK(s.contains(k));
    CHECK(s["iterations"] == 5);
    CHECK(fs::exists(out + ".manifest.json"));
    CHECK(json::parse(r.out) == s);

    auto const again = t.file("again.fld");
    REQUIRE(nlip_run({"minimize", "--config", cfg, "--grid", "16", "--max-iters", "5", "--out", again}).code == 0);
    CHECK(slurp(out) == slurp(again));
}
