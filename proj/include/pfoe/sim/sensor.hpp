#pragma once

#include <array>

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"
#include "pfoe/sim/world.hpp"

namespace pfoe::sim {

/// Four IR-style range sensors:
///   reading = (ambient + A_j * d^-gamma) * exp(sigma * eps),
/// rounded and clamped to >= 1. Rays start at the robot center; a ray with no
/// wall within max_range reads the ambient level alone.
///
/// The defaults loosely follow a log-log linear intensity/distance curve with
/// a distinct gain per channel; they are not a calibration of real hardware.
struct SensorModel {
  std::array<double, kChannels> gain{7.0, 5.0, 4.0, 9.0};
  /// Mounting angles relative to the heading (lf, ls, rs, rf).
  std::array<double, kChannels> angle{0.26, 0.87, -0.87, -0.26};
  double exponent = 2.0;
  double log_sigma = 0.3;
  double max_range = 1.0;
  double ambient = 0.0;

  void validate() const;
};

/// Noise-free intensity for a wall at distance d (no rounding or clamping).
double intensity(const SensorModel& model, std::size_t channel, double distance);

Observation sense(const Pose& pose, const WorldMap& world, const SensorModel& model, Rng& rng);

}  // namespace pfoe::sim
