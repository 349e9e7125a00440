#include "nlip/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlip/error.hpp"

namespace nlip {

using json = nlohmann::json;

void ModelParams::validate() const {
    if (!std::isfinite(Z) || Z < 0.0) throw Error(ErrorKind::InvalidParams, "Z must be finite and >= 0");
    if (!std::isfinite(V) || V < 0.0) throw Error(ErrorKind::InvalidParams, "V must be finite and >= 0");
    if (!std::isfinite(tol_rel) || tol_rel <= 0.0)
        throw Error(ErrorKind::InvalidParams, "tol_rel must be finite and > 0");
}

DerivedConstants derive_constants(ModelParams const& params) {
    params.validate();
    DerivedConstants d;
    d.R_Z = radius_for_volume(params.Z);
    d.z_eff = params.V >= params.Z ? std::sqrt(params.V - params.Z) * std::cbrt(params.Z) : 0.0;
    return d;
}

double BallConfig::volume() const {
    double v = 0.0;
    for (auto const& b : balls) v += b.volume();
    return v;
}

BallConfig const& validate_ball_config(BallConfig const& config) {
    constexpr double slack = 1e-12;
    auto const& balls = config.balls;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        if (!(balls[i].radius > 0.0) || !std::isfinite(balls[i].radius))
            throw Error(ErrorKind::NonPositiveRadius, "ball " + std::to_string(i) + " has radius <= 0");
    }
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            double const d = norm(balls[i].center - balls[j].center);
            double const rsum = balls[i].radius + balls[j].radius;
            if (d < rsum * (1.0 - slack)) {
                std::ostringstream os;
                os << "balls " << i << " and " << j << " overlap (distance " << d << " < " << rsum << ")";
                throw Error(ErrorKind::OverlappingBalls, os.str());
            }
        }
    }
    for (std::size_t i = 0; i < balls.size(); ++i) {
        auto const& b = balls[i];
        if (!b.origin_centered() && norm(b.center) < b.radius * (1.0 - slack)) {
            throw Error(ErrorKind::OffCenterOriginBall,
                        "ball " + std::to_string(i) + " contains the origin but is not centered there");
        }
    }
    return config;
}

namespace {

double require_number(json const& j, char const* key) {
    if (!j.is_number()) throw Error(ErrorKind::InvalidConfig, std::string("'") + key + "' must be a number");
    return j.get<double>();
}

void reject_unknown(json const& obj, std::initializer_list<char const*> allowed, char const* where) {
    for (auto const& [key, value] : obj.items()) {
        bool known = false;
        for (auto const* a : allowed) known = known || key == a;
        if (!known) throw Error(ErrorKind::InvalidConfig, std::string("unknown key '") + key + "' in " + where);
    }
}

Vec3 parse_vec3(json const& j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::InvalidConfig, "'center' must be [x, y, z]");
    return {require_number(j[0], "center"), require_number(j[1], "center"), require_number(j[2], "center")};
}

} // namespace

RunConfig parse_config(std::string const& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (json::parse_error const& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
    reject_unknown(doc, {"Z", "V", "tol_rel", "seed", "balls", "shells"}, "config");
    if (!doc.contains("Z") || !doc.contains("V")) throw Error(ErrorKind::InvalidConfig, "'Z' and 'V' are required");

    RunConfig cfg;
    cfg.params.Z = require_number(doc["Z"], "Z");
    cfg.params.V = require_number(doc["V"], "V");
    if (doc.contains("tol_rel")) cfg.params.tol_rel = require_number(doc["tol_rel"], "tol_rel");
    if (doc.contains("seed")) {
        auto const& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
            throw Error(ErrorKind::InvalidConfig, "'seed' must be a non-negative integer");
        cfg.params.seed = s.get<std::uint64_t>();
    }
    try {
        cfg.params.validate();
    } catch (Error const& e) {
        throw Error(ErrorKind::InvalidConfig, e.what());
    }

    cfg.balls.nucleus_charge = cfg.params.Z;
    if (doc.contains("balls")) {
        cfg.has_balls = true;
        auto const& arr = doc["balls"];
        if (!arr.is_array()) throw Error(ErrorKind::InvalidConfig, "'balls' must be an array");
        for (auto const& b : arr) {
            if (!b.is_object()) throw Error(ErrorKind::InvalidConfig, "ball entries must be objects");
            reject_unknown(b, {"center", "radius"}, "ball");
            if (!b.contains("center") || !b.contains("radius"))
                throw Error(ErrorKind::InvalidConfig, "ball needs 'center' and 'radius'");
            cfg.balls.balls.push_back({parse_vec3(b["center"]), require_number(b["radius"], "radius")});
        }
    }
    if (doc.contains("shells")) {
        auto const& arr = doc["shells"];
        if (!arr.is_array()) throw Error(ErrorKind::InvalidConfig, "'shells' must be an array");
        for (auto const& s : arr) {
            if (!s.is_object()) throw Error(ErrorKind::InvalidConfig, "shell entries must be objects");
            reject_unknown(s, {"inner", "outer"}, "shell");
            if (!s.contains("inner") || !s.contains("outer"))
                throw Error(ErrorKind::InvalidConfig, "shell needs 'inner' and 'outer'");
            Shell sh{require_number(s["inner"], "inner"), require_number(s["outer"], "outer")};
            if (!(sh.inner >= 0.0 && sh.outer > sh.inner))
                throw Error(ErrorKind::InvalidConfig, "shell needs 0 <= inner < outer");
            cfg.shells.push_back(sh);
        }
    }
    return cfg;
}

RunConfig load_config(std::filesystem::path const& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_canonical_json(RunConfig const& config) {
    json doc;
    doc["Z"] = config.params.Z;
    doc["V"] = config.params.V;
    doc["tol_rel"] = config.params.tol_rel;
    doc["seed"] = config.params.seed;
    if (config.has_balls) {
        doc["balls"] = json::array();
        for (auto const& b : config.balls.balls)
            doc["balls"].push_back({{"center", {b.center.x, b.center.y, b.center.z}}, {"radius", b.radius}});
    }
    if (!config.shells.empty()) {
        doc["shells"] = json::array();
        for (auto const& s : config.shells) doc["shells"].push_back({{"inner", s.inner}, {"outer", s.outer}});
    }
    return doc.dump();
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t params_hash(RunConfig const& config) { return fnv1a64(to_canonical_json(config)); }

} // namespace nlip
