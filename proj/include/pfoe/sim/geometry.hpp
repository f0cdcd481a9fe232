#pragma once

#include <cmath>
#include <optional>

namespace pfoe::sim {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
  constexpr double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }

  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;

  double length() const { return (b - a).norm(); }
};

/// Normalizes an angle into (-pi, pi].
double normalize_angle(double theta);

/// Distance along the ray origin + s * dir (dir need not be unit; s is in
/// units of |dir|) to the first crossing with the segment, if any, s >= 0.
std::optional<double> ray_segment_intersect(Vec2 origin, Vec2 dir, const Segment& seg);

Vec2 closest_point(const Segment& seg, Vec2 p);
double point_segment_distance(const Segment& seg, Vec2 p);

/// Earliest fraction s in [0, 1] at which a disc of the given radius moving
/// from p0 by `motion` touches the segment; nullopt when it never does, 0
/// when it already overlaps and moves further in.
std::optional<double> disc_sweep(Vec2 p0, Vec2 motion, double radius, const Segment& seg);

}  // namespace pfoe::sim
