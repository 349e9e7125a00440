#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "nlip/vec3.hpp"

namespace nlip {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// N-point Gauss-Legendre rule mapped to [a, b].
template <unsigned N>
QuadratureRule gauss_legendre(double a, double b) {
    using G = boost::math::quadrature::gauss<double, N>;
    auto const& x = G::abscissa();
    auto const& w = G::weights();
    double const mid = 0.5 * (a + b), half = 0.5 * (b - a);
    QuadratureRule r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            r.nodes.push_back(mid);
            r.weights.push_back(half * w[i]);
            continue;
        }
        r.nodes.push_back(mid - half * x[i]);
        r.weights.push_back(half * w[i]);
        r.nodes.push_back(mid + half * x[i]);
        r.weights.push_back(half * w[i]);
    }
    return r;
}

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta), trapezoid
/// in phi. Weights sum to 4 pi.
struct SphereRule {
    std::vector<Vec3> directions;
    std::vector<double> weights;
};

template <unsigned NTheta>
SphereRule sphere_rule(int n_phi) {
    auto const mu = gauss_legendre<NTheta>(-1.0, 1.0);
    SphereRule s;
    double const dphi = 2.0 * std::numbers::pi / n_phi;
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
        double const z = mu.nodes[i];
        double const rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int j = 0; j < n_phi; ++j) {
            double const phi = (j + 0.5) * dphi;
            s.directions.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
            s.weights.push_back(mu.weights[i] * dphi);
        }
    }
    return s;
}

/// Quasi-uniform directions (Fibonacci lattice).
inline std::vector<Vec3> fibonacci_sphere(int n) {
    std::vector<Vec3> dirs;
    double const golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        double const z = 1.0 - (2.0 * i + 1.0) / n;
        double const rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        double const phi = golden * i;
        dirs.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
    }
    return dirs;
}

} // namespace nlip
