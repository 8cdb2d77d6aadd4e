#pragma once

#include <cmath>
#include <stdexcept>

namespace hallufault {

// World frame: x runs along the transverse street, z along the AV travel axis.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    Vec2() = default;
    Vec2(double x_, double z_) : x(x_), z(z_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, z + o.z}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, z - o.z}; }
    Vec2 operator*(double s) const { return {x * s, z * s}; }

    double norm() const { return std::hypot(x, z); }
    bool finite() const { return std::isfinite(x) && std::isfinite(z); }
};

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hallufault
