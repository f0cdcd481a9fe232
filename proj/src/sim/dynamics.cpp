#include "pfoe/sim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pfoe::sim {

namespace {

constexpr double kSkin = 1e-7;  // clearance kept after a contact, meters

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

struct Contact {
  double s = 1.0;
  const Segment* seg = nullptr;
};

Contact first_contact(Vec2 p, Vec2 motion, double radius, const WorldMap& world) {
  Contact c;
  for (const auto& seg : world.segments) {
    auto s = disc_sweep(p, motion, radius, seg);
    if (s && *s < c.s) {
      c.s = *s;
      c.seg = &seg;
    }
  }
  return c;
}

}  // namespace

void MotionNoise::validate() const {
  if (linear_mean < 0.0 || angular_mean < 0.0 || linear_sigma < 0.0 || angular_sigma < 0.0 ||
      heading_sigma < 0.0) {
    throw std::invalid_argument("motion noise factors must be non-negative");
  }
}

Vec2 move_disc(Vec2 p, Vec2 motion, double radius, const WorldMap& world) {
  for (int pass = 0; pass < 3; ++pass) {
    const double len = motion.norm();
    if (len == 0.0) return p;
    const Contact c = first_contact(p, motion, radius, world);
    if (!c.seg) return p + motion;
    const double s = std::max(0.0, c.s - kSkin / len);
    p = p + motion * s;
    // Slide: keep the part of the remaining motion tangent to the wall.
    const Vec2 rest = motion * (1.0 - s);
    Vec2 n = p - closest_point(*c.seg, p);
    const double nn = n.norm();
    if (nn == 0.0) return p;
    n = n * (1.0 / nn);
    const double into = rest.dot(n);
    motion = into < 0.0 ? rest - n * into : rest;
  }
  return p;
}

Pose step_dynamics(const Pose& pose, const Action& action, double dt, const MotionNoise& noise,
                   Rng& rng, const WorldMap& world, const RobotBody& body) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double eta_l = std::max(0.0, noise.linear_mean + noise.linear_sigma * gauss(rng));
  const double eta_a = std::max(0.0, noise.angular_mean + noise.angular_sigma * gauss(rng));
  const double jitter = noise.heading_sigma * gauss(rng);

  const bool moving = action.v_linear != 0.0 || action.v_angular != 0.0;
  if (!moving) return pose;

  const double dtheta = action.v_angular * dt * eta_a + jitter;
  const double mid = pose.theta + 0.5 * dtheta;
  const double chord = action.v_linear * dt * eta_l * sinc(0.5 * dtheta);
  const Vec2 motion{chord * std::cos(mid), chord * std::sin(mid)};
  const Vec2 p = move_disc(pose.position(), motion, body.radius, world);
  return Pose{p.x, p.y, normalize_angle(pose.theta + dtheta)};
}

Pose step_dynamics(const Pose& pose, const Action& action, double dt, const MotionNoise& noise,
                   Rng& rng) {
  static const WorldMap empty;
  return step_dynamics(pose, action, dt, noise, rng, empty);
}

}  // namespace pfoe::sim
