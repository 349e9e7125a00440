#pragma once

#include <vector>

#include "nlip/grid.hpp"

namespace nlip::grid {

/// ∫ 1/|x| over the box [0,a]x[0,b]x[0,c] (corner at the origin), closed form.
double corner_box_inverse_distance(double a, double b, double c);

/// Per-cell average of 1/|x|: the center value, except for cells whose closed
/// extent contains the origin, which get the exact cell average.
std::vector<double> inverse_distance_kernel(GridGeometry const& g);

/// Perimeter of a density field by the coarea formula: total variation
/// ∫|∇rho| (central differences) after one [1,2,1]/4 mollification pass.
/// Averages the perimeters of all threshold sets {rho > t}.
double perimeter_estimate(GridField const& field);

/// h^3 sum rho * Z * K with K from inverse_distance_kernel.
double nuclear_attraction(GridField const& field, double Z);

EnergyBreakdown grid_energy(GridField const& field, ModelParams const& params);

/// gamma = 2 pi - ∫ rho/|x|. Throws MassMismatch unless mass is within 1% of |B_1|.
double gamma_deficit(GridField const& field);

/// Mass of the field inside B_R(center). A boundary cell contributes
/// min(rho, overlap fraction), treating the set and the ball as nested within
/// the cell; a rasterized ball then has exactly its own mass inside itself.
double mass_in_ball(GridField const& field, double R, Vec3 const& center = {});

Vec3 center_of_mass(GridField const& field);

/// Binary field {rho >= level}.
GridField threshold(GridField const& field, double level = 0.5);

/// |∂Ω|^3 / (36 pi |Ω|^2); equal to 1 for a ball.
inline double isoperimetric_ratio(double perimeter, double volume) {
    return perimeter * perimeter * perimeter / (36.0 * pi * volume * volume);
}

} // namespace nlip::grid
