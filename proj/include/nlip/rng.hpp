#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "nlip/vec3.hpp"

namespace nlip {

/// Counter-based generator: every draw is splitmix64(seed, stream, counter),
/// so a stream can be reproduced or skipped ahead without replaying state.
/// Distributions are implemented here rather than via <random> so outputs are
/// identical across standard libraries.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        return mix(mix(seed_ ^ mix(stream_)) + counter_++);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = uniform();
        double const u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Vec3 unit_vector() {
        double const z = uniform(-1.0, 1.0);
        double const phi = uniform(0.0, 2.0 * std::numbers::pi);
        double const s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {s * std::cos(phi), s * std::sin(phi), z};
    }

    /// Uniform point in the unit ball.
    Vec3 in_unit_ball() { return unit_vector() * std::cbrt(uniform()); }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

/// Van der Corput radical inverse in the given prime base.
inline double radical_inverse(std::uint64_t index, unsigned base) {
    double result = 0.0;
    double const inv = 1.0 / base;
    double f = inv;
    while (index > 0) {
        result += f * double(index % base);
        index /= base;
        f *= inv;
    }
    return result;
}

} // namespace nlip
