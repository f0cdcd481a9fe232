#pragma once

#include <cstddef>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"

namespace pfoe {

/// Exact belief over episode indices; probs[0] holds Bel(1).
struct ExactBelief {
  std::vector<double> probs;

  std::size_t length() const { return probs.size(); }
  double at(std::size_t t) const { return probs[t - 1]; }
};

ExactBelief uniform_belief(std::size_t episode_length);
ExactBelief point_mass(std::size_t episode_length, std::size_t t);

/// Forward prediction through the particle kernel, including the
/// redistribution of out-of-range destinations over 1..T. O(T * |offsets|).
ExactBelief exact_predict(const ExactBelief& bel, const KernelParams& params);

/// Bel(t) proportional to likelihood(z_t, z) * bel(t), normalized.
ExactBelief exact_correct(const ExactBelief& bel, const Observation& z, const Episode& episode);

/// Total variation distance; throws std::invalid_argument on length mismatch.
double tv_distance(const ExactBelief& bel, const ParticleSet& ps);
double tv_distance(const ExactBelief& a, const ExactBelief& b);

}  // namespace pfoe
