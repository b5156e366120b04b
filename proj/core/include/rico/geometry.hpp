#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace rico {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }

  friend constexpr bool operator==(Vec2, Vec2) = default;
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Axis-aligned rectangle; interior is the open box (min, max).
struct Rect {
  Vec2 min;
  Vec2 max;

  constexpr bool contains_strict(Vec2 p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
  }
  constexpr bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  constexpr bool valid() const { return min.x < max.x && min.y < max.y; }

  friend constexpr bool operator==(const Rect&, const Rect&) = default;
};

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

inline bool finite(double v) { return std::isfinite(v); }

/// Euclidean distance from a point to a closed rectangle (0 inside).
inline double distance_to_rect(Vec2 p, const Rect& r) {
  const double dx = std::max({r.min.x - p.x, 0.0, p.x - r.max.x});
  const double dy = std::max({r.min.y - p.y, 0.0, p.y - r.max.y});
  return std::hypot(dx, dy);
}

/// Distance from point p to segment [a, b].
inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

/// Slab test. Returns the smallest t in [0, t_max] at which the ray
/// origin + t * dir enters the closed rectangle, if any.
inline std::optional<double> ray_rect(Vec2 origin, Vec2 dir, const Rect& r,
                                      double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {r.min.x, r.min.y};
  const double hi[2] = {r.max.x, r.max.y};
  for (int i = 0; i < 2; ++i) {
    if (d[i] == 0.0) {
      if (o[i] < lo[i] || o[i] > hi[i]) return std::nullopt;
      continue;
    }
    double ta = (lo[i] - o[i]) / d[i];
    double tb = (hi[i] - o[i]) / d[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

/// True when the closed segment [a, b] touches the open interior of r.
inline bool segment_hits_interior(Vec2 a, Vec2 b, const Rect& r) {
  const Vec2 d = b - a;
  double t0 = 0.0;
  double t1 = 1.0;
  const double o[2] = {a.x, a.y};
  const double dd[2] = {d.x, d.y};
  const double lo[2] = {r.min.x, r.min.y};
  const double hi[2] = {r.max.x, r.max.y};
  for (int i = 0; i < 2; ++i) {
    if (dd[i] == 0.0) {
      if (o[i] <= lo[i] || o[i] >= hi[i]) return false;
      continue;
    }
    double ta = (lo[i] - o[i]) / dd[i];
    double tb = (hi[i] - o[i]) / dd[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  return true;
}

/// Minimum distance between segment [a, b] and a closed rectangle.
inline double segment_rect_distance(Vec2 a, Vec2 b, const Rect& r) {
  if (r.contains(a) || r.contains(b) || segment_hits_interior(a, b, r)) return 0.0;
  // Separated convex sets in 2D: the minimum is attained at an endpoint of
  // one of them.
  double best = std::min(distance_to_rect(a, r), distance_to_rect(b, r));
  const Vec2 corners[4] = {r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}};
  for (const Vec2& c : corners) best = std::min(best, distance_to_segment(c, a, b));
  return best;
}

/// Smallest t >= 0 where the ray enters the disc, or nullopt.
inline std::optional<double> ray_circle(Vec2 origin, Vec2 dir, Vec2 center,
                                        double radius) {
  const Vec2 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.dot(oc) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t = -b - s;
  if (t >= 0.0) return t;
  return std::nullopt;  // origin inside or disc behind
}

}  // namespace rico
