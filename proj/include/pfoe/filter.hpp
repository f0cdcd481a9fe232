#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pfoe/episode.hpp"

namespace pfoe {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

__extension__ using Uint128 = unsigned __int128;

/// Uniform integer in [1, n] from one draw (multiply-shift).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  const auto wide = static_cast<Uint128>(rng()) * n;
  return static_cast<std::size_t>(wide >> 64) + 1;
}

/// A hypothesis that the current state resembles the state at episode index t.
struct Particle {
  std::uint32_t t = 1;
  double w = 0.0;

  friend bool operator==(const Particle&, const Particle&) = default;
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::size_t episode_length = 0;

  std::size_t size() const { return particles.size(); }
  double total_weight() const;

  friend bool operator==(const ParticleSet&, const ParticleSet&) = default;
};

/// Transition kernel on the time axis.
///
/// With probability 1 - delta a particle at t moves to t + 1 + offsets[k]
/// with probability probs[k]; with probability delta it is redrawn uniformly
/// from 1..T. Destinations outside 1..T are also redrawn uniformly.
struct KernelParams {
  double delta = 0.1;
  std::vector<int> offsets{-1, 0, 1};
  std::vector<double> probs{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  /// Throws std::invalid_argument when probs do not form a distribution.
  void validate() const;
};

struct FilterConfig {
  KernelParams kernel;
  /// Resample only when ESS/N drops below ess_threshold. Off reproduces the
  /// unconditional resampling of the reference algorithm.
  bool ess_gate = false;
  double ess_threshold = 0.5;
};

/// n particles at uniformly drawn indices 1..T, weights 1/n.
ParticleSet init_particles(std::size_t episode_length, std::size_t n, Rng& rng);
ParticleSet init_particles(const Episode& episode, std::size_t n, std::uint64_t seed);

/// Draws one destination for a particle at t. Consumes one draw for the
/// branch and one for the destination (plus one more on overflow).
std::uint32_t sample_destination(std::uint32_t t, std::size_t episode_length,
                                 const KernelParams& params, Rng& rng);

/// Redraws every index from the kernel, in particle order. Weights unchanged.
void motion_update(ParticleSet& ps, const KernelParams& params, Rng& rng);

/// prod_j 1 / (|log10 z_a[j] - log10 z_b[j]| + 1). Throws std::domain_error
/// when any channel is below 1.
double likelihood(const Observation& z_a, const Observation& z_b);

/// w_i *= likelihood(z_{t_i}, z) followed by normalization. A zero total
/// resets the weights to uniform.
void measurement_update(ParticleSet& ps, const Observation& z, const Episode& episode);

/// Systematic resampling: one offset u in [0, 1/N), selection points u + k/N.
void resample(ParticleSet& ps, Rng& rng);
void resample(ParticleSet& ps, Rng& rng, std::vector<Particle>& scratch);

double effective_sample_size(const ParticleSet& ps);

/// Bel(t) = sum of the weights of the particles at t. Throws std::out_of_range.
double belief_at(const ParticleSet& ps, std::size_t t);

/// Dense belief, element 0 holds Bel(1).
std::vector<double> belief(const ParticleSet& ps);

/// One control cycle: motion update, measurement update, resampling.
///
/// The action is part of the event but the kernel does not condition on it.
void step(ParticleSet& ps, const Action& action, const Observation& z, const Episode& episode,
          const FilterConfig& config, Rng& rng);

/// A filter instance: particle set, episode reference, config and its own
/// generator, plus scratch buffers reused across cycles.
class ParticleFilter {
 public:
  ParticleFilter(const Episode& episode, std::size_t n, std::uint64_t seed,
                 FilterConfig config = {});

  void motion_update();
  void measurement_update(const Observation& z);
  void resample();
  void step(const Action& action, const Observation& z);

  /// Reinitializes uniformly without reseeding.
  void reset();

  const ParticleSet& particles() const { return ps_; }
  const Episode& episode() const { return *episode_; }
  const FilterConfig& config() const { return config_; }
  std::size_t size() const { return ps_.size(); }
  Rng& rng() { return rng_; }

 private:
  const Episode* episode_;
  FilterConfig config_;
  Rng rng_;
  ParticleSet ps_;
  std::vector<Particle> scratch_;
};

}  // namespace pfoe
