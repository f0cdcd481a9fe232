#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"

namespace pfoe {

enum class Policy { mode, mean };

Policy parse_policy(std::string_view name);
std::string_view to_string(Policy p);

struct ModeEstimate {
  std::size_t t = 0;  // 0 when the set is empty
  double mass = 0.0;
};

/// argmax_t Bel(t) over 1..last (last defaults to T), smallest t on ties.
///
/// Runs in O(N) regardless of T: `scratch` must hold at least T + 1 zeros
/// and is returned zeroed.
ModeEstimate mode_estimate(const ParticleSet& ps, std::vector<double>& scratch,
                           std::size_t last = 0);
ModeEstimate mode_estimate(const ParticleSet& ps, std::size_t last = 0);

/// a_{t+1} for the mode t over 1..T-1 (t = T has no successor action).
Action mode_policy(const ParticleSet& ps, const Episode& episode);
Action mode_policy(const ParticleSet& ps, const Episode& episode, std::vector<double>& scratch);

/// Belief-weighted mean of the successor actions a_{t+1}, t in 1..T-1, with
/// the weights renormalized over that range. Returns a zero action when all
/// of the mass sits at T.
Action mean_policy(const ParticleSet& ps, const Episode& episode);

Action decide(Policy policy, const ParticleSet& ps, const Episode& episode,
              std::vector<double>& scratch);

}  // namespace pfoe
