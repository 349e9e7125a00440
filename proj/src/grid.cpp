#include "nlip/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "nlip/error.hpp"

namespace nlip::grid {

GridGeometry GridGeometry::centered(std::array<int, 3> dims, double h) {
    GridGeometry g;
    g.dims = dims;
    g.h = h;
    // floor(n/2) cells on the negative side: the origin sits on a cell corner
    // for even and odd n alike.
    g.origin_offset = {(-(dims[0] / 2) + 0.5) * h, (-(dims[1] / 2) + 0.5) * h, (-(dims[2] / 2) + 0.5) * h};
    g.validate();
    return g;
}

void GridGeometry::validate() const {
    if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
        throw Error(ErrorKind::GeometryMismatch, "grid dimensions must be positive");
    if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::GeometryMismatch, "grid spacing must be > 0");
    auto on_center = [&](double off) {
        double const u = -off / h;
        return std::abs(u - std::round(u)) < 1e-9;
    };
    if (on_center(origin_offset.x) && on_center(origin_offset.y) && on_center(origin_offset.z)) {
        Vec3 const lo = box_lo(), hi = box_hi();
        bool const inside = lo.x < 0 && 0 < hi.x && lo.y < 0 && 0 < hi.y && lo.z < 0 && 0 < hi.z;
        if (inside) throw Error(ErrorKind::GeometryMismatch, "a cell center coincides with the origin");
    }
}

GridField::GridField(GridGeometry geom) : geom_(geom), data_(geom.size(), 0.0) { geom_.validate(); }

GridField::GridField(GridGeometry geom, std::vector<double> data) : geom_(geom), data_(std::move(data)) {
    geom_.validate();
    if (data_.size() != geom_.size()) throw Error(ErrorKind::GeometryMismatch, "data size does not match grid");
    for (double& v : data_) {
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
            throw Error(ErrorKind::GeometryMismatch, "density values must lie in [0, 1]");
        v = std::clamp(v, 0.0, 1.0);
    }
}

double GridField::mass() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s * geom_.cell_volume();
}

double ScalarField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * geom.cell_volume();
}

double interpolate(GridGeometry const& g, std::span<double const> values, Vec3 const& p) {
    double const u[3] = {(p.x - g.origin_offset.x) / g.h, (p.y - g.origin_offset.y) / g.h,
                         (p.z - g.origin_offset.z) / g.h};
    int base[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        double const f = std::floor(u[a]);
        base[a] = int(f);
        t[a] = u[a] - f;
    }
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                int const i = base[0] + di, j = base[1] + dj, k = base[2] + dk;
                if (i < 0 || j < 0 || k < 0 || i >= g.dims[0] || j >= g.dims[1] || k >= g.dims[2]) continue;
                double const w = (di ? t[0] : 1 - t[0]) * (dj ? t[1] : 1 - t[1]) * (dk ? t[2] : 1 - t[2]);
                acc += w * values[g.index(i, j, k)];
            }
    return acc;
}

namespace {

double subsample_fraction(Vec3 const& c, double h, int n, std::function<bool(Vec3 const&)> const& inside) {
    int count = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int d = 0; d < n; ++d) {
                Vec3 const p = c + Vec3{(a + 0.5) / n - 0.5, (b + 0.5) / n - 0.5, (d + 0.5) / n - 0.5} * h;
                count += inside(p) ? 1 : 0;
            }
    return double(count) / double(n * n * n);
}

void require_in_box(GridGeometry const& g, Vec3 const& c, double r) {
    Vec3 const lo = g.box_lo(), hi = g.box_hi();
    double const m = 2.0 * g.h;
    if (c.x - r < lo.x + m || c.y - r < lo.y + m || c.z - r < lo.z + m || c.x + r > hi.x - m ||
        c.y + r > hi.y - m || c.z + r > hi.z - m)
        throw Error(ErrorKind::BallOutOfBox, "shape does not fit inside the box with a 2h margin");
}

} // namespace

GridField rasterize_sdf(GridGeometry const& g, std::function<double(Vec3 const&)> const& sdf) {
    std::vector<double> data(g.size(), 0.0);
    double const half_diag = 0.5 * std::sqrt(3.0) * g.h;
    auto inside = [&](Vec3 const& p) { return sdf(p) < 0.0; };
    for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        Vec3 const c = g.center(i, j, k);
        double const d = sdf(c);
        if (d <= -half_diag)
            data[idx] = 1.0;
        else if (d < half_diag)
            data[idx] = subsample_fraction(c, g.h, 3, inside);
    });
    return GridField(g, std::move(data));
}

GridField rasterize_indicator(GridGeometry const& g, std::function<bool(Vec3 const&)> const& inside,
                              int subsamples) {
    std::vector<double> data(g.size(), 0.0);
    for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
        data[idx] = subsample_fraction(g.center(i, j, k), g.h, subsamples, inside);
    });
    return GridField(g, std::move(data));
}

GridField rasterize(BallConfig const& config, GridGeometry const& g) {
    validate_ball_config(config);
    for (auto const& b : config.balls) require_in_box(g, b.center, b.radius);
    if (config.balls.empty()) return GridField(g);
    auto const& balls = config.balls;
    return rasterize_sdf(g, [&](Vec3 const& p) {
        double d = norm(p - balls.front().center) - balls.front().radius;
        for (std::size_t i = 1; i < balls.size(); ++i) d = std::min(d, norm(p - balls[i].center) - balls[i].radius);
        return d;
    });
}

GridField rasterize(BallConfig const& config, std::array<int, 3> dims, double h) {
    return rasterize(config, GridGeometry::centered(dims, h));
}

GridField rasterize_shells(std::vector<Shell> const& shells, GridGeometry const& g) {
    for (auto const& s : shells) require_in_box(g, {}, s.outer);
    if (shells.empty()) return GridField(g);
    return rasterize_sdf(g, [&](Vec3 const& p) {
        double const r = norm(p);
        double d = std::numeric_limits<double>::infinity();
        for (auto const& s : shells) d = std::min(d, std::max(s.inner - r, r - s.outer));
        return d;
    });
}

namespace {

constexpr char kMagic[8] = {'N', 'L', 'I', 'P', 'F', 'L', 'D', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<char const*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    in.read(reinterpret_cast<char*>(bytes), sizeof(T));
    if (!in) throw Error(ErrorKind::Io, "truncated field dump");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

} // namespace

void write_field(std::filesystem::path const& path, GridGeometry const& g, std::span<double const> data) {
    if (data.size() != g.size()) throw Error(ErrorKind::GeometryMismatch, "data size does not match grid");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out.write(kMagic, sizeof(kMagic));
    for (int d : g.dims) put_le<std::uint32_t>(out, std::uint32_t(d));
    put_le<double>(out, g.h);
    put_le<double>(out, g.origin_offset.x);
    put_le<double>(out, g.origin_offset.y);
    put_le<double>(out, g.origin_offset.z);
    for (double v : data) put_le<double>(out, v);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

GridField read_field(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw Error(ErrorKind::Io, path.string() + " is not an NLIPFLD1 dump");
    GridGeometry g;
    for (int& d : g.dims) d = int(get_le<std::uint32_t>(in));
    g.h = get_le<double>(in);
    g.origin_offset.x = get_le<double>(in);
    g.origin_offset.y = get_le<double>(in);
    g.origin_offset.z = get_le<double>(in);
    g.validate();
    std::vector<double> data(g.size());
    for (double& v : data) v = get_le<double>(in);
    return GridField(g, std::move(data));
}

} // namespace nlip::grid
