#pragma once
// Random unit-volume star-shaped sets for sampling the isoperimetric deficit
// against the Coulomb attraction gap gamma.

#include <complex>
#include <cstdint>
#include <vector>

#include "nlip/model.hpp"

namespace nlip::grid {

/// Star-shaped set {center + scale * (1 + p(w)) * t w : 0 <= t < 1}, with p a
/// sum of real parts of (a . w)^l for isotropic complex vectors a; each term
/// restricts a harmonic polynomial of degree l to the sphere.
struct StarShape {
    struct Mode {
        int degree = 2;
        double amplitude = 0.0;
        std::complex<double> a[3];  // a . a = 0, |a| = 1
    };
    Vec3 center;
    double scale = 1.0;
    std::vector<Mode> modes;

    /// 1 + p(w) for a unit vector w.
    double radial(Vec3 const& w) const;
    /// Euclidean gradient of p at w (the tangential part drives the surface).
    Vec3 radial_gradient(Vec3 const& w) const;
    bool contains(Vec3 const& x) const;
};

struct SurfaceIntegrals {
    double area = 0.0;
    double volume = 0.0;
};

/// Surface area and enclosed volume by spectral quadrature of the parametrized
/// boundary.
SurfaceIntegrals surface_integrals(StarShape const& shape);

/// ∫_Ω 1/|x - z| dx via the divergence identity div((x-z)/|x-z|) = 2/|x-z|.
double inverse_distance_integral(StarShape const& shape, Vec3 const& z);

/// Gradient in z of inverse_distance_integral.
Vec3 inverse_distance_gradient(StarShape const& shape, Vec3 const& z);

/// Rescales about the center so that the volume equals |B_1|.
StarShape normalize_volume(StarShape shape);

struct IsopOptions {
    double amplitude_max = 0.25;  // largest degree-2 amplitude
    double shift_max = 1.5;       // largest translation of the center
    int l_max = 4;
    int modes_per_degree = 2;
};

struct IsopSample {
    double perimeter_excess = 0.0;  // |∂Ω| - |∂B_1|
    double gamma = 0.0;             // 2 pi - ∫_Ω 1/|x|
    double gamma_centered = 0.0;    // 2 pi - max_z ∫_Ω 1/|x - z|
    Vec3 shift;
    double amplitude = 0.0;
};

/// Draws one random unit-volume shape; amplitude of degree l is
/// A / (l-1)^2 with A uniform in [0, amplitude_max].
StarShape random_star_shape(std::uint64_t seed, std::uint64_t index, IsopOptions const& opts);

IsopSample evaluate_isop(StarShape const& shape);

/// n samples; sample i depends only on (seed, i).
std::vector<IsopSample> isop_sample(int n, std::uint64_t seed, IsopOptions const& opts = {});

struct IsopSummary {
    int counted = 0;            // samples with gamma_centered > threshold
    double c_isop = 0.0;        // min perimeter_excess / gamma_centered
    int counted_origin = 0;     // samples with gamma > threshold
    double min_ratio_origin = 0.0;  // min perimeter_excess / gamma
    double min_excess = 0.0;
};

IsopSummary summarize_isop(std::vector<IsopSample> const& samples, double gamma_threshold = 0.01);

} // namespace nlip::grid
