#pragma once
// Uniform box grids: geometry, density fields, rasterization and the
// NLIPFLD1 field dump.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "nlip/model.hpp"

namespace nlip::grid {

/// Cell (i,j,k) has its center at origin_offset + h*(i,j,k); storage is
/// row-major with x fastest.
struct GridGeometry {
    std::array<int, 3> dims{0, 0, 0};
    double h = 0.0;
    Vec3 origin_offset;

    /// Box centered on the origin with the origin on a cell corner, so no
    /// cell center ever coincides with the nucleus.
    static GridGeometry centered(std::array<int, 3> dims, double h);
    static GridGeometry centered_cube(int n, double side) { return centered({n, n, n}, side / n); }

    /// Throws GeometryMismatch for non-positive dims/spacing or when the
    /// origin coincides with a cell center.
    void validate() const;

    std::size_t size() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }
    std::size_t index(int i, int j, int k) const {
        return (std::size_t(k) * dims[1] + j) * dims[0] + i;
    }
    Vec3 center(int i, int j, int k) const {
        return origin_offset + Vec3{i * h, j * h, k * h};
    }
    double cell_volume() const { return h * h * h; }
    Vec3 box_lo() const { return origin_offset - Vec3{h, h, h} * 0.5; }
    Vec3 box_hi() const {
        return origin_offset + Vec3{(dims[0] - 0.5) * h, (dims[1] - 0.5) * h, (dims[2] - 0.5) * h};
    }
    bool operator==(GridGeometry const&) const = default;
};

/// Calls fn(i, j, k, idx) for every cell in storage order.
template <class Fn>
void for_each_cell(GridGeometry const& g, Fn&& fn) {
    std::size_t idx = 0;
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i, ++idx) fn(i, j, k, idx);
}

/// Density field with values in [0, 1].
class GridField {
public:
    GridField() = default;
    explicit GridField(GridGeometry geom);
    /// Values within 1e-12 of [0,1] are clamped; anything further out throws.
    GridField(GridGeometry geom, std::vector<double> data);

    GridGeometry const& geometry() const { return geom_; }
    std::span<double const> data() const { return data_; }
    std::size_t size() const { return data_.size(); }
    double operator[](std::size_t i) const { return data_[i]; }

    /// h^3 * sum of data.
    double mass() const;

private:
    GridGeometry geom_;
    std::vector<double> data_;
};

/// Unconstrained real values on a grid (potentials, signed densities, test
/// functions).
struct ScalarField {
    GridGeometry geom;
    std::vector<double> values;

    static ScalarField zeros(GridGeometry g) { return {g, std::vector<double>(g.size(), 0.0)}; }
    static ScalarField from(GridField const& f) {
        return {f.geometry(), std::vector<double>(f.data().begin(), f.data().end())};
    }
    double integral() const;
};

/// Trilinear interpolation of cell-centered values at p; values beyond the
/// box are taken as zero.
double interpolate(GridGeometry const& g, std::span<double const> values, Vec3 const& p);

/// Rasterizes a shape described by an approximate signed distance (negative
/// inside, 1-Lipschitz). Cells farther than half a cell diagonal from the
/// boundary get 0/1, the rest the fraction of a 3x3x3 subsample inside.
GridField rasterize_sdf(GridGeometry const& g, std::function<double(Vec3 const&)> const& sdf);

/// Same, for a bare inside predicate: every cell is subsampled.
GridField rasterize_indicator(GridGeometry const& g, std::function<bool(Vec3 const&)> const& inside,
                              int subsamples = 3);

/// Ball union on a centered box. Throws BallOutOfBox unless every ball keeps
/// a margin of 2h to the box faces.
GridField rasterize(BallConfig const& config, GridGeometry const& g);
GridField rasterize(BallConfig const& config, std::array<int, 3> dims, double h);

/// Origin-centered shells (inner = 0 gives a ball).
GridField rasterize_shells(std::vector<Shell> const& shells, GridGeometry const& g);

/// Bit-exact NLIPFLD1 dump: magic, u32 dims, f64 h, f64 offset[3], f64 data,
/// all little-endian.
void write_field(std::filesystem::path const& path, GridGeometry const& g, std::span<double const> data);
GridField read_field(std::filesystem::path const& path);

} // namespace nlip::grid
