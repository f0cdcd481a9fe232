#pragma once

#include <cstdint>

#include "pfoe/sim/dynamics.hpp"
#include "pfoe/sim/sensor.hpp"
#include "pfoe/sim/world.hpp"

namespace pfoe::sim {

struct SimConfig {
  SensorModel sensor;
  MotionNoise noise;
  RobotBody body;
  double dt = 0.1;
  /// Integration sub-steps per control cycle.
  int substeps = 1;
};

/// Seeded robot-in-a-world simulator. One generator drives both motion noise
/// and sensor noise, so a seed fixes the whole trajectory.
class Simulator {
 public:
  Simulator(WorldMap world, SimConfig config, std::uint64_t seed);

  /// Executes one control cycle with the given action.
  void apply(const Action& action);
  Observation sense();
  void teleport(const Pose& pose) { pose_ = pose; }
  void reset() { pose_ = world_.start; }

  const Pose& pose() const { return pose_; }
  const WorldMap& world() const { return world_; }
  const SimConfig& config() const { return config_; }
  Rng& rng() { return rng_; }

 private:
  WorldMap world_;
  SimConfig config_;
  Rng rng_;
  Pose pose_;
};

}  // namespace pfoe::sim
