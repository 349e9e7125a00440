#pragma once
// Radial stretch of the outer annulus A_{3R/4, R} and grid checks of how it
// changes volume, perimeter, a potential term and the Coulomb energy.

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "nlip/grid.hpp"

namespace nlip::deform {

struct StretchParams {
    double R = 1.0;
    double lambda = 0.0;
    /// Throws InvalidParams unless R > 0 and 0 <= lambda <= 0.2.
    void validate() const;
    double inner() const { return 0.75 * R; }
};

/// f(r) = r - lambda (R - r). Throws OutOfAnnulus unless 3R/4 <= r <= R.
double stretch_map(double r, StretchParams const& p);
/// (1 + lambda) (f(r)/r)^2, the Jacobian of x -> f(|x|) x/|x|.
double stretch_jacobian(double r, StretchParams const& p);
/// Inverse of f, extended affinely outside the image annulus.
double stretch_inverse(double s, StretchParams const& p);

/// Pullback rho'(x) = rho(F^{-1}(x)) with trilinear interpolation.
/// Throws SupportOutOfAnnulus if any occupied cell center lies farther than
/// half a cell diagonal from the annulus.
grid::GridField apply_stretch(grid::GridField const& field, StretchParams const& p);

struct EstimatePair {
    double lhs = 0.0;
    double rhs = 0.0;
    double band_lo = 0.0;  // lhs >= band_lo * rhs (estimate 1 only)
    double band_hi = 0.0;  // lhs <= band_hi * rhs
    bool within = false;
    double ratio() const { return rhs != 0.0 ? lhs / rhs : 0.0; }
};

/// Constants of the four comparisons. The upper bands are twice the largest
/// ratio seen in the 50-set oracle run at 128^3, lambda = 0.05
/// (tools/deform_oracle, output in tests/fixtures/deform_oracle_128.csv).
/// They are empirical and carry no meaning beyond this discretization.
struct DeformBands {
    double volume_lo = 0.3;
    double volume_hi = 3.0;
    double perimeter_hi = 1.5;   // oracle max 0.727
    double potential_hi = 0.8;   // oracle max 0.378
    double coulomb_hi = 3.0;     // oracle max 1.531
};

struct DeformReport {
    StretchParams params;
    EstimatePair volume;     // |F(E)| - |E|  vs  lambda |E|
    EstimatePair perimeter;  // P(F(E)) - P(E)  vs  lambda (P(E) - 2 cap + 4|E|/R)
    EstimatePair potential;  // ∫_{F(E)} phi - ∫_E phi  vs  lambda ∫_E (phi + 1)
    EstimatePair coulomb;    // D(F(E)) - D(E)  vs  lambda D(E)
    double cap_area = 0.0;   // area of E on the outer sphere
    bool all_within() const { return volume.within && perimeter.within && potential.within && coulomb.within; }
};

/// phi defaults to |x|/R, whose gradient has norm exactly 1/R. A supplied phi
/// must satisfy |∇phi| <= 1/R inside B_R (checked by central differences,
/// throws InvalidParams otherwise).
DeformReport verify_deform_estimates(grid::GridField const& field, StretchParams const& p,
                                     std::optional<grid::ScalarField> const& phi = std::nullopt,
                                     DeformBands const& bands = {});

/// Area of {x on the sphere |x| = r : field >= 1/2}, by direction sampling.
double cap_area(grid::GridField const& field, double r, int directions = 4000);

/// Random subset of the annulus A_{3R/4, R}: its intersection with a union of
/// 1 to 6 balls centered in the annulus, or the full annulus for index 0.
grid::GridField random_shell_set(grid::GridGeometry const& g, double R, std::uint64_t seed, std::uint64_t index);

} // namespace nlip::deform
