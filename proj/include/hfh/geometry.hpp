#pragma once

#include <cmath>
#include <numbers>

namespace hfh {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double angle_of(Vec2 a) { return std::atan2(a.y, a.x); }

inline Vec2 normalized(Vec2 a)
{
    const double n = norm(a);
    return n > 0.0 ? (1.0 / n) * a : a;
}

/// Signed angle in (-pi, pi] that rotates direction `from` onto direction `to`.
inline double signed_turn(Vec2 from, Vec2 to)
{
    return std::atan2(cross(from, to), dot(from, to));
}

/// Counter-clockwise rotation in [0, pi) carrying the line spanned by `from`
/// onto the line spanned by `to`.
inline double line_rotation_ccw(Vec2 from, Vec2 to)
{
    double a = std::remainder(angle_of(to) - angle_of(from), std::numbers::pi);
    if (a < 0.0) a += std::numbers::pi;
    return a;
}

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    constexpr double det() const { return a * d - b * c; }
    constexpr double trace() const { return a + d; }

    constexpr Mat2 inverse() const
    {
        const double det_value = det();
        return {d / det_value, -b / det_value, -c / det_value, a / det_value};
    }

    friend constexpr Vec2 operator*(const Mat2& m, Vec2 v)
    {
        return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
    }

    friend constexpr Mat2 operator*(const Mat2& m, const Mat2& n)
    {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }
};

/// Axis-aligned box; manifold tracing and orbit evaluation stop at its boundary.
struct Box {
    Vec2 lo{-10.0, -10.0};
    Vec2 hi{10.0, 10.0};

    constexpr bool contains(Vec2 z) const
    {
        return z.x >= lo.x && z.x <= hi.x && z.y >= lo.y && z.y <= hi.y;
    }
};

}  // namespace hfh
