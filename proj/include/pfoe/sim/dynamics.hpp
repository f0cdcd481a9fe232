#pragma once

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"
#include "pfoe/sim/world.hpp"

namespace pfoe::sim {

/// Per-step wheel slip. Linear and angular displacements are scaled by
/// factors drawn from N(mean, sigma) clamped at 0; heading jitter is added
/// whenever the robot is commanded to move.
struct MotionNoise {
  double linear_mean = 0.92;
  double linear_sigma = 0.08;
  double angular_mean = 0.96;
  double angular_sigma = 0.08;
  double heading_sigma = 0.01;

  static MotionNoise none() { return {1.0, 0.0, 1.0, 0.0, 0.0}; }
  void validate() const;
};

struct RobotBody {
  double radius = 0.06;
};

/// Unicycle integration over dt with exact arc geometry: the heading turns by
/// dtheta and the position moves along the chord of the arc, which points at
/// the mid heading and has length v*dt*sinc(dtheta/2). Contact with a wall
/// stops the normal component of the motion; the remainder slides along it.
Pose step_dynamics(const Pose& pose, const Action& action, double dt, const MotionNoise& noise,
                   Rng& rng, const WorldMap& world, const RobotBody& body = {});

/// Free-space variant (no walls).
Pose step_dynamics(const Pose& pose, const Action& action, double dt, const MotionNoise& noise,
                   Rng& rng);

/// Moves a disc from p by `motion`, resolving wall contacts.
Vec2 move_disc(Vec2 p, Vec2 motion, double radius, const WorldMap& world);

}  // namespace pfoe::sim
