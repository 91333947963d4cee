#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace omania {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double k, Vec2 v) { return v * k; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
constexpr double norm_sq(Vec2 v) { return dot(v, v); }
// Rotates by +90 degrees (counter-clockwise).
constexpr Vec2 left_normal(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double angle_of(Vec2 v) { return std::atan2(v.y, v.x); }

inline Vec2 normalized(Vec2 v) {
    const double n = norm(v);
    return n > 0.0 ? v * (1.0 / n) : Vec2{};
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

struct Segment {
    Vec2 a;
    Vec2 b;

    Vec2 direction() const { return b - a; }
    double length() const { return norm(b - a); }
};

// Parameter in [0, 1] of the point on `seg` closest to `p`.
inline double closest_param(const Segment& seg, Vec2 p) {
    const Vec2 d = seg.b - seg.a;
    const double len_sq = norm_sq(d);
    if (len_sq == 0.0) return 0.0;
    const double t = dot(p - seg.a, d) / len_sq;
    return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

inline Vec2 point_on(const Segment& seg, double t) { return seg.a + (seg.b - seg.a) * t; }

// Distance along the ray `origin + t * dir` (dir unit length) to `seg`, if
// the ray crosses it at t >= 0.
inline std::optional<double> ray_segment_hit(Vec2 origin, Vec2 dir, const Segment& seg) {
    const Vec2 e = seg.b - seg.a;
    const double denom = cross(dir, e);
    if (denom == 0.0) return std::nullopt;
    const Vec2 w = seg.a - origin;
    const double t = cross(w, e) / denom;
    const double u = cross(w, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

// Proper or touching intersection of two closed segments.
inline bool segments_intersect(const Segment& p, const Segment& q) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        const double v = cross(b - a, c - a);
        return (v > 0.0) - (v < 0.0);
    };
    auto on_seg = [](Vec2 a, Vec2 b, Vec2 c) {
        return std::fmin(a.x, b.x) <= c.x && c.x <= std::fmax(a.x, b.x) &&
               std::fmin(a.y, b.y) <= c.y && c.y <= std::fmax(a.y, b.y);
    };
    const int o1 = orient(p.a, p.b, q.a);
    const int o2 = orient(p.a, p.b, q.b);
    const int o3 = orient(q.a, q.b, p.a);
    const int o4 = orient(q.a, q.b, p.b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_seg(p.a, p.b, q.a)) return true;
    if (o2 == 0 && on_seg(p.a, p.b, q.b)) return true;
    if (o3 == 0 && on_seg(q.a, q.b, p.a)) return true;
    if (o4 == 0 && on_seg(q.a, q.b, p.b)) return true;
    return false;
}

}  // namespace omania
