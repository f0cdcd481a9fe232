#include "pfoe/sim/simulator.hpp"

#include <stdexcept>

namespace pfoe::sim {

Simulator::Simulator(WorldMap world, SimConfig config, std::uint64_t seed)
    : world_(std::move(world)), config_(config), rng_(seed), pose_(world_.start) {
  config_.sensor.validate();
  config_.noise.validate();
  if (config_.substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (!(config_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
}

void Simulator::apply(const Action& action) {
  const double h = config_.dt / config_.substeps;
  for (int i = 0; i < config_.substeps; ++i) {
    pose_ = step_dynamics(pose_, action, h, config_.noise, rng_, world_, config_.body);
  }
}

Observation Simulator::sense() { return pfoe::sim::sense(pose_, world_, config_.sensor, rng_); }

}  // namespace pfoe::sim
