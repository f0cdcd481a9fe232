#include "pfoe/sim/sensor.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pfoe::sim {

void SensorModel::validate() const {
  for (double a : gain) {
    if (!(a > 0.0)) throw std::invalid_argument("sensor gains must be positive");
  }
  if (!(exponent > 0.0)) throw std::invalid_argument("sensor exponent must be positive");
  if (!(log_sigma >= 0.0)) throw std::invalid_argument("sensor noise must be non-negative");
  if (!(max_range > 0.0)) throw std::invalid_argument("sensor range must be positive");
  if (!(ambient >= 0.0)) throw std::invalid_argument("ambient level must be non-negative");
}

double intensity(const SensorModel& model, std::size_t channel, double distance) {
  return model.gain[channel] * std::pow(distance, -model.exponent);
}

Observation sense(const Pose& pose, const WorldMap& world, const SensorModel& model, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::array<std::int64_t, kChannels> raw{};
  for (std::size_t j = 0; j < kChannels; ++j) {
    // Always draw so that the stream does not depend on the geometry.
    const double eps = gauss(rng);
    const auto d = world.cast(pose.position(), pose.theta + model.angle[j], model.max_range);
    const double signal = d ? intensity(model, j, std::max(*d, 1e-6)) : 0.0;
    const double value = (model.ambient + signal) * std::exp(model.log_sigma * eps);
    raw[j] = static_cast<std::int64_t>(std::llround(std::min(value, 2.0e9)));
  }
  return clamp_observation(raw);
}

}  // namespace pfoe::sim
