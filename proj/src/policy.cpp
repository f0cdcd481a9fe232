#include "pfoe/policy.hpp"

#include <stdexcept>

namespace pfoe {

Policy parse_policy(std::string_view name) {
  if (name == "mode") return Policy::mode;
  if (name == "mean") return Policy::mean;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected mode|mean)");
}

std::string_view to_string(Policy p) { return p == Policy::mode ? "mode" : "mean"; }

ModeEstimate mode_estimate(const ParticleSet& ps, std::vector<double>& scratch, std::size_t last) {
  if (last == 0 || last > ps.episode_length) last = ps.episode_length;
  if (scratch.size() < ps.episode_length + 1) scratch.assign(ps.episode_length + 1, 0.0);
  for (const auto& p : ps.particles) scratch[p.t] += p.w;
  ModeEstimate best;
  for (const auto& p : ps.particles) {
    if (p.t > last) continue;
    const double m = scratch[p.t];
    if (best.t == 0 || m > best.mass || (m == best.mass && p.t < best.t)) {
      best.t = p.t;
      best.mass = m;
    }
  }
  for (const auto& p : ps.particles) scratch[p.t] = 0.0;
  return best;
}

ModeEstimate mode_estimate(const ParticleSet& ps, std::size_t last) {
  std::vector<double> scratch(ps.episode_length + 1, 0.0);
  return mode_estimate(ps, scratch, last);
}

namespace {

void require_successor(const ParticleSet& ps, const Episode& episode) {
  if (episode.length() < 2) throw std::invalid_argument("policies need an episode with T >= 2");
  if (ps.episode_length != episode.length()) {
    throw std::invalid_argument("particle set and episode lengths differ");
  }
}

}  // namespace

Action mode_policy(const ParticleSet& ps, const Episode& episode, std::vector<double>& scratch) {
  require_successor(ps, episode);
  auto mode = mode_estimate(ps, scratch, episode.length() - 1);
  // Every particle sits at T: all candidates tie at zero.
  if (mode.t == 0) mode.t = 1;
  return episode.action(mode.t + 1);
}

Action mode_policy(const ParticleSet& ps, const Episode& episode) {
  std::vector<double> scratch(episode.length() + 1, 0.0);
  return mode_policy(ps, episode, scratch);
}

Action mean_policy(const ParticleSet& ps, const Episode& episode) {
  require_successor(ps, episode);
  const std::size_t T = episode.length();
  double mass = 0.0;
  Action sum;
  for (const auto& p : ps.particles) {
    if (p.t >= T) continue;
    const Action& a = episode.action(p.t + 1);
    sum.v_linear += p.w * a.v_linear;
    sum.v_angular += p.w * a.v_angular;
    mass += p.w;
  }
  if (!(mass > 0.0)) return {};
  return {sum.v_linear / mass, sum.v_angular / mass};
}

Action decide(Policy policy, const ParticleSet& ps, const Episode& episode,
              std::vector<double>& scratch) {
  return policy == Policy::mode ? mode_policy(ps, episode, scratch) : mean_policy(ps, episode);
}

}  // namespace pfoe
