#include "pfoe/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pfoe {

ExactBelief uniform_belief(std::size_t episode_length) {
  if (episode_length < 1) throw std::invalid_argument("belief needs at least one index");
  return {std::vector<double>(episode_length, 1.0 / static_cast<double>(episode_length))};
}

ExactBelief point_mass(std::size_t episode_length, std::size_t t) {
  if (t < 1 || t > episode_length) throw std::out_of_range("point mass index out of range");
  ExactBelief b{std::vector<double>(episode_length, 0.0)};
  b.probs[t - 1] = 1.0;
  return b;
}

ExactBelief exact_predict(const ExactBelief& bel, const KernelParams& params) {
  params.validate();
  const auto T = static_cast<std::int64_t>(bel.length());
  ExactBelief out{std::vector<double>(bel.probs.size(), 0.0)};
  double spread = 0.0;  // mass redistributed uniformly over 1..T
  for (std::int64_t t = 1; t <= T; ++t) {
    const double m = bel.probs[static_cast<std::size_t>(t - 1)];
    if (m == 0.0) continue;
    spread += params.delta * m;
    const double moving = (1.0 - params.delta) * m;
    for (std::size_t k = 0; k < params.offsets.size(); ++k) {
      const std::int64_t dest = t + 1 + params.offsets[k];
      const double mass = moving * params.probs[k];
      if (dest < 1 || dest > T) {
        spread += mass;
      } else {
        out.probs[static_cast<std::size_t>(dest - 1)] += mass;
      }
    }
  }
  const double share = spread / static_cast<double>(T);
  for (auto& p : out.probs) p += share;
  return out;
}

ExactBelief exact_correct(const ExactBelief& bel, const Observation& z, const Episode& episode) {
  if (bel.length() != episode.length()) {
    throw std::invalid_argument("belief and episode lengths differ");
  }
  ExactBelief out{bel.probs};
  double total = 0.0;
  for (std::size_t t = 1; t <= out.length(); ++t) {
    out.probs[t - 1] *= likelihood(episode.observation(t), z);
    total += out.probs[t - 1];
  }
  if (!(total > 0.0)) return uniform_belief(bel.length());
  for (auto& p : out.probs) p /= total;
  return out;
}

double tv_distance(const ExactBelief& a, const ExactBelief& b) {
  if (a.length() != b.length()) {
    throw std::invalid_argument("tv_distance: dimension mismatch (" + std::to_string(a.length()) +
                                " vs " + std::to_string(b.length()) + ")");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) s += std::abs(a.probs[i] - b.probs[i]);
  return 0.5 * s;
}

double tv_distance(const ExactBelief& bel, const ParticleSet& ps) {
  if (bel.length() != ps.episode_length) {
    throw std::invalid_argument("tv_distance: dimension mismatch (" + std::to_string(bel.length()) +
                                " vs " + std::to_string(ps.episode_length) + ")");
  }
  return tv_distance(bel, ExactBelief{belief(ps)});
}

}  // namespace pfoe
