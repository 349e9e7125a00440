#pragma once

#include <cmath>

namespace nlip {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr Vec3 operator+(Vec3 const& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(Vec3 const& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3& operator+=(Vec3 const& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr bool operator==(Vec3 const&) const = default;
};

constexpr Vec3 operator*(double s, Vec3 const& v) { return v * s; }
constexpr double dot(Vec3 const& a, Vec3 const& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 const& a, Vec3 const& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 const& v) { return std::sqrt(dot(v, v)); }

} // namespace nlip
