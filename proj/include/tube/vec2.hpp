#pragma once
// Minimal 2-D vector math. Everything is a value type; no dynamic allocation.

#include <cmath>

namespace tube {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
inline Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3-D cross product; positive when b is ccw from a.
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }
inline Vec2 normalized(Vec2 v) {
  double n = norm(v);
  return {v.x / n, v.y / n};
}
// v rotated +90 degrees.
inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }
inline bool isfinite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Distance from p to the segment [a, b] (clamped projection).
inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 d = b - a;
  double dd = norm2(d);
  if (dd == 0.0) return norm(p - a);
  double t = dot(p - a, d) / dd;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return norm(p - (a + t * d));
}

}  // namespace tube
