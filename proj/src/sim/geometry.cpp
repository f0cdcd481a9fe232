#include "pfoe/sim/geometry.hpp"

#include <algorithm>

namespace pfoe::sim {

double normalize_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

std::optional<double> ray_segment_intersect(Vec2 origin, Vec2 dir, const Segment& seg) {
  const Vec2 e = seg.b - seg.a;
  const double denom = dir.cross(e);
  const Vec2 w = seg.a - origin;
  if (denom == 0.0) {
    // Parallel. Collinear overlap: report the nearest segment point ahead.
    if (w.cross(dir) != 0.0) return std::nullopt;
    const double dd = dir.dot(dir);
    if (dd == 0.0) return std::nullopt;
    const double sa = w.dot(dir) / dd;
    const double sb = (seg.b - origin).dot(dir) / dd;
    if (sa < 0.0 && sb < 0.0) return std::nullopt;
    if (sa <= 0.0 || sb <= 0.0) return 0.0;
    return std::min(sa, sb);
  }
  const double s = w.cross(e) / denom;
  const double u = w.cross(dir) / denom;
  if (s < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return s;
}

Vec2 closest_point(const Segment& seg, Vec2 p) {
  const Vec2 e = seg.b - seg.a;
  const double ee = e.dot(e);
  if (ee == 0.0) return seg.a;
  const double u = std::clamp((p - seg.a).dot(e) / ee, 0.0, 1.0);
  return seg.a + e * u;
}

double point_segment_distance(const Segment& seg, Vec2 p) {
  return (p - closest_point(seg, p)).norm();
}

namespace {

std::optional<double> disc_vs_point(Vec2 p0, Vec2 d, double r, Vec2 q) {
  const Vec2 m = p0 - q;
  const double a = d.dot(d);
  const double b = 2.0 * d.dot(m);
  const double c = m.dot(m) - r * r;
  if (a == 0.0 || b >= 0.0) return std::nullopt;  // not approaching
  if (c <= 0.0) return 0.0;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = (-b - std::sqrt(disc)) / (2.0 * a);
  if (s > 1.0) return std::nullopt;
  return std::max(s, 0.0);
}

}  // namespace

std::optional<double> disc_sweep(Vec2 p0, Vec2 motion, double radius, const Segment& seg) {
  std::optional<double> best;
  auto take = [&](std::optional<double> s) {
    if (s && (!best || *s < *best)) best = s;
  };

  const Vec2 e = seg.b - seg.a;
  const double len = e.norm();
  if (len > 0.0) {
    const Vec2 n{-e.y / len, e.x / len};
    const double h0 = (p0 - seg.a).dot(n);
    const double dh = motion.dot(n);
    // Moving toward the segment's supporting line from one side.
    if (dh != 0.0 && h0 * dh < 0.0) {
      const double s = std::max(0.0, (std::abs(h0) - radius) / std::abs(dh));
      if (s <= 1.0) {
        const Vec2 c = p0 + motion * s;
        const double u = (c - seg.a).dot(e) / (len * len);
        if (u >= 0.0 && u <= 1.0) take(s);
      }
    }
  }
  take(disc_vs_point(p0, motion, radius, seg.a));
  take(disc_vs_point(p0, motion, radius, seg.b));
  return best;
}

}  // namespace pfoe::sim
