#pragma once

#include <cmath>
#include <ostream>

namespace kbound {

/// Point or vector in the Euclidean plane. Templated on the scalar so that
/// curve maps can be pushed through Taylor jets with the same code.
template <typename T>
struct Vec2T {
    T x{};
    T y{};

    constexpr Vec2T() = default;
    constexpr Vec2T(T x_, T y_) : x(x_), y(y_) {}

    constexpr Vec2T& operator+=(const Vec2T& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2T& operator-=(const Vec2T& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2T& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2T operator+(Vec2T a, const Vec2T& b) { return a += b; }
    friend constexpr Vec2T operator-(Vec2T a, const Vec2T& b) { return a -= b; }
    friend constexpr Vec2T operator-(const Vec2T& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2T operator*(Vec2T a, double s) { return a *= s; }
    friend constexpr Vec2T operator*(double s, Vec2T a) { return a *= s; }
};

using Vec2 = Vec2T<double>;

constexpr bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

/// Counter-clockwise quarter turn; applied to a unit tangent it gives the left normal.
constexpr Vec2 rot90(const Vec2& a) { return {-a.y, a.x}; }

inline Vec2 rotate(const Vec2& a, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline Vec2 normalized(const Vec2& a) {
    const double n = norm(a);
    return {a.x / n, a.y / n};
}

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
}

}  // namespace kbound
