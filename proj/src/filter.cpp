#include "pfoe/filter.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace pfoe {

double ParticleSet::total_weight() const {
  double s = 0.0;
  for (const auto& p : particles) s += p.w;
  return s;
}

void KernelParams::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (offsets.empty() || offsets.size() != probs.size()) {
    throw std::invalid_argument("kernel offsets and probabilities must be non-empty and aligned");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("kernel probabilities must be non-negative");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("kernel probabilities must sum to 1");
}

ParticleSet init_particles(std::size_t episode_length, std::size_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("particle count must be >= 1");
  if (episode_length < 1) throw std::invalid_argument("episode must contain at least one event");
  ParticleSet ps;
  ps.episode_length = episode_length;
  ps.particles.resize(n);
  const double w = 1.0 / static_cast<double>(n);
  for (auto& p : ps.particles) {
    p.t = static_cast<std::uint32_t>(uniform_index(rng, episode_length));
    p.w = w;
  }
  return ps;
}

ParticleSet init_particles(const Episode& episode, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return init_particles(episode.length(), n, rng);
}

std::uint32_t sample_destination(std::uint32_t t, std::size_t episode_length,
                                 const KernelParams& params, Rng& rng) {
  const double branch = uniform01(rng);
  if (branch < params.delta) {
    return static_cast<std::uint32_t>(uniform_index(rng, episode_length));
  }
  const double pick = uniform01(rng);
  const std::size_t last = params.probs.size() - 1;
  std::size_t k = 0;
  double acc = params.probs[0];
  while (k < last && pick >= acc) acc += params.probs[++k];
  const auto dest = static_cast<std::int64_t>(t) + 1 + params.offsets[k];
  if (dest < 1 || dest > static_cast<std::int64_t>(episode_length)) {
    return static_cast<std::uint32_t>(uniform_index(rng, episode_length));
  }
  return static_cast<std::uint32_t>(dest);
}

void motion_update(ParticleSet& ps, const KernelParams& params, Rng& rng) {
  for (auto& p : ps.particles) p.t = sample_destination(p.t, ps.episode_length, params, rng);
}

namespace {

std::array<double, kChannels> log10_channels(const Observation& z) {
  std::array<double, kChannels> out{};
  for (std::size_t j = 0; j < kChannels; ++j) {
    if (z.z[j] < 1) {
      throw std::domain_error(std::string(kChannelNames[j]) + " must be >= 1 for the likelihood");
    }
    out[j] = std::log10(static_cast<double>(z.z[j]));
  }
  return out;
}

// Same factor order as likelihood(), so results are bit-identical.
double likelihood_against(const Observation& stored, const std::array<double, kChannels>& log_z) {
  double l = 1.0;
  for (std::size_t j = 0; j < kChannels; ++j) {
    const double diff = std::abs(std::log10(static_cast<double>(stored.z[j])) - log_z[j]);
    l *= 1.0 / (diff + 1.0);
  }
  return l;
}

void reset_uniform(ParticleSet& ps) {
  const double w = 1.0 / static_cast<double>(ps.size());
  for (auto& p : ps.particles) p.w = w;
}

}  // namespace

double likelihood(const Observation& z_a, const Observation& z_b) {
  const auto la = log10_channels(z_a);
  const auto lb = log10_channels(z_b);
  double l = 1.0;
  for (std::size_t j = 0; j < kChannels; ++j) l *= 1.0 / (std::abs(la[j] - lb[j]) + 1.0);
  return l;
}

void measurement_update(ParticleSet& ps, const Observation& z, const Episode& episode) {
  const auto log_z = log10_channels(z);
  double total = 0.0;
  for (auto& p : ps.particles) {
    p.w *= likelihood_against(episode.observation(p.t), log_z);
    total += p.w;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    reset_uniform(ps);
    return;
  }
  const double inv = 1.0 / total;
  for (auto& p : ps.particles) p.w *= inv;
}

void resample(ParticleSet& ps, Rng& rng, std::vector<Particle>& scratch) {
  const std::size_t n = ps.size();
  if (n == 0) return;
  const double total = ps.total_weight();
  if (!(total > 0.0)) {
    reset_uniform(ps);
    return;
  }
  // Work in units of 1/N: cumulative weight scaled to N, selection points u + k.
  const double scale = static_cast<double>(n) / total;
  const double u = uniform01(rng);
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ps.particles[i].w > 0.0) last_positive = i;
  }
  scratch.resize(n);
  const double w = 1.0 / static_cast<double>(n);
  std::size_t i = 0;
  double cumulative = ps.particles[0].w * scale;
  for (std::size_t k = 0; k < n; ++k) {
    const double point = u + static_cast<double>(k);
    while (i < last_positive && point >= cumulative) {
      ++i;
      cumulative += ps.particles[i].w * scale;
    }
    scratch[k] = Particle{ps.particles[i].t, w};
  }
  ps.particles.swap(scratch);
}

void resample(ParticleSet& ps, Rng& rng) {
  std::vector<Particle> scratch;
  resample(ps, rng, scratch);
}

double effective_sample_size(const ParticleSet& ps) {
  double s = 0.0;
  double s2 = 0.0;
  for (const auto& p : ps.particles) {
    s += p.w;
    s2 += p.w * p.w;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

double belief_at(const ParticleSet& ps, std::size_t t) {
  if (t < 1 || t > ps.episode_length) {
    throw std::out_of_range("belief index " + std::to_string(t) + " outside 1.." +
                            std::to_string(ps.episode_length));
  }
  double b = 0.0;
  for (const auto& p : ps.particles) {
    if (p.t == t) b += p.w;
  }
  return b;
}

std::vector<double> belief(const ParticleSet& ps) {
  std::vector<double> b(ps.episode_length, 0.0);
  for (const auto& p : ps.particles) b[p.t - 1] += p.w;
  return b;
}

void step(ParticleSet& ps, const Action& /*action*/, const Observation& z, const Episode& episode,
          const FilterConfig& config, Rng& rng) {
  motion_update(ps, config.kernel, rng);
  measurement_update(ps, z, episode);
  if (config.ess_gate &&
      effective_sample_size(ps) >= config.ess_threshold * static_cast<double>(ps.size())) {
    return;
  }
  resample(ps, rng);
}

ParticleFilter::ParticleFilter(const Episode& episode, std::size_t n, std::uint64_t seed,
                               FilterConfig config)
    : episode_(&episode), config_(std::move(config)), rng_(seed) {
  config_.kernel.validate();
  ps_ = init_particles(episode.length(), n, rng_);
  scratch_.reserve(n);
}

void ParticleFilter::motion_update() { pfoe::motion_update(ps_, config_.kernel, rng_); }

void ParticleFilter::measurement_update(const Observation& z) {
  pfoe::measurement_update(ps_, z, *episode_);
}

void ParticleFilter::resample() {
  if (config_.ess_gate &&
      effective_sample_size(ps_) >= config_.ess_threshold * static_cast<double>(ps_.size())) {
    return;
  }
  pfoe::resample(ps_, rng_, scratch_);
}

void ParticleFilter::step(const Action& /*action*/, const Observation& z) {
  motion_update();
  measurement_update(z);
  resample();
}

void ParticleFilter::reset() { ps_ = init_particles(episode_->length(), ps_.size(), rng_); }

}  // namespace pfoe
