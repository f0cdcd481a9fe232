#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "fixtures.hpp"
#include "pfoe/filter.hpp"

using namespace pfoe;

namespace {

Observation obs(int a, int b, int c, int d) { return Observation{{a, b, c, d}}; }

// Closed-form destination distribution of the kernel for a particle at t.
std::vector<double> kernel_marginal(std::uint32_t t, std::size_t T, const KernelParams& k) {
  std::vector<double> p(T, k.delta / static_cast<double>(T));
  for (std::size_t i = 0; i < k.offsets.size(); ++i) {
    const long dest = static_cast<long>(t) + 1 + k.offsets[i];
    const double mass = (1.0 - k.delta) * k.probs[i];
    if (dest >= 1 && dest <= static_cast<long>(T)) {
      p[dest - 1] += mass;
    } else {
      for (auto& x : p) x += mass / static_cast<double>(T);
    }
  }
  return p;
}

double chi_square_p(const std::vector<long>& counts, const std::vector<double>& probs, long n) {
  double stat = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double e = probs[i] * static_cast<double>(n);
    if (e <= 0.0) continue;
    stat += (counts[i] - e) * (counts[i] - e) / e;
    ++cells;
  }
  boost::math::chi_squared dist(cells - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("uniform_index stays in 1..n") {
  Rng rng(3);
  std::vector<int> hits(8, 0);
  for (int i = 0; i < 80000; ++i) {
    const auto k = uniform_index(rng, 7);
    REQUIRE(k >= 1);
    REQUIRE(k <= 7);
    ++hits[k];
  }
  for (int k = 1; k <= 7; ++k) CHECK(std::abs(hits[k] - 80000 / 7) < 600);
  CHECK(uniform_index(rng, 1) == 1);
}

TEST_CASE("likelihood") {
  const auto z = obs(10, 20, 300, 4);
  CHECK(likelihood(z, z) == 1.0);
  CHECK(likelihood(obs(100, 20, 300, 4), z) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(likelihood(obs(1, 1, 1, 1), obs(10, 10, 10, 10)) == doctest::Approx(1.0 / 16.0));

  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto r = [&] { return static_cast<int>(uniform_index(rng, 4000)); };
    const auto a = obs(r(), r(), r(), r());
    const auto b = obs(r(), r(), r(), r());
    const double l = likelihood(a, b);
    CHECK(l == likelihood(b, a));
    CHECK(l > 0.0);
    CHECK(l <= 1.0);
  }
  CHECK_THROWS_AS(likelihood(obs(0, 1, 1, 1), z), std::domain_error);
}

TEST_CASE("kernel destination frequencies") {
  const KernelParams k;
  const std::size_t T = 40;
  for (std::uint32_t t : {1u, 20u, 39u, 40u}) {
    CAPTURE(t);
    Rng rng(100 + t);
    const long n = 200000;
    std::vector<long> counts(T, 0);
    for (long i = 0; i < n; ++i) ++counts[sample_destination(t, T, k, rng) - 1];
    CHECK(chi_square_p(counts, kernel_marginal(t, T, k), n) > 0.001);
  }
}

TEST_CASE("kernel params validation") {
  KernelParams k;
  CHECK_NOTHROW(k.validate());
  k.delta = 1.5;
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k.delta = 0.1;
  k.probs = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
  k.probs = {1.0};
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);
}

TEST_CASE("delta 0 with a single offset is a deterministic shift") {
  KernelParams k;
  k.delta = 0.0;
  k.offsets = {0};
  k.probs = {1.0};
  Rng rng(1);
  CHECK(sample_destination(5, 10, k, rng) == 6);
  CHECK(sample_destination(9, 10, k, rng) == 10);
}

TEST_CASE("motion update keeps weights") {
  Rng rng(5);
  auto ps = init_particles(50, 300, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) ps.particles[i].w = static_cast<double>(i);
  const auto before = ps;
  motion_update(ps, KernelParams{}, rng);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    CHECK(ps.particles[i].w == before.particles[i].w);
    CHECK(ps.particles[i].t >= 1);
    CHECK(ps.particles[i].t <= 50);
  }
}

TEST_CASE("measurement update normalizes and favours matching indices") {
  const auto ep = fixtures::synthetic_episode(30);
  ParticleSet ps;
  ps.episode_length = 30;
  for (std::uint32_t t = 1; t <= 30; ++t) ps.particles.push_back({t, 1.0 / 30.0});
  measurement_update(ps, ep.observation(17), ep);
  CHECK(ps.total_weight() == doctest::Approx(1.0));
  const auto best = std::max_element(ps.particles.begin(), ps.particles.end(),
                                     [](auto& a, auto& b) { return a.w < b.w; });
  CHECK(best->t == 17);
}

TEST_CASE("systematic resampling copy counts") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 300);
    ParticleSet ps;
    ps.episode_length = n;
    double total = 0.0;
    for (std::uint32_t i = 1; i <= n; ++i) {
      double w = uniform01(rng);
      if (uniform01(rng) < 0.3) w = 0.0;
      ps.particles.push_back({i, w});
      total += w;
    }
    if (total == 0.0) continue;
    std::vector<double> nw;
    for (const auto& p : ps.particles) nw.push_back(static_cast<double>(n) * p.w / total);
    resample(ps, rng);
    std::map<std::uint32_t, std::size_t> copies;
    for (const auto& p : ps.particles) {
      ++copies[p.t];
      CHECK(p.w == 1.0 / static_cast<double>(n));
    }
    for (std::uint32_t i = 1; i <= n; ++i) {
      const double x = nw[i - 1];
      const auto c = static_cast<double>(copies[i]);
      CHECK(c >= std::floor(x - 1e-9));
      CHECK(c <= std::ceil(x + 1e-9));
    }
  }
}

TEST_CASE("resampling a point mass") {
  ParticleSet ps;
  ps.episode_length = 5;
  for (std::uint32_t t = 1; t <= 5; ++t) ps.particles.push_back({t, t == 3 ? 1.0 : 0.0});
  Rng rng(9);
  resample(ps, rng);
  for (const auto& p : ps.particles) CHECK(p.t == 3);
}

TEST_CASE("effective sample size and belief") {
  ParticleSet ps;
  ps.episode_length = 4;
  ps.particles = {{1, 0.25}, {1, 0.25}, {2, 0.25}, {4, 0.25}};
  CHECK(effective_sample_size(ps) == doctest::Approx(4.0));
  CHECK(belief_at(ps, 1) == doctest::Approx(0.5));
  CHECK(belief_at(ps, 3) == 0.0);
  CHECK_THROWS_AS(belief_at(ps, 0), std::out_of_range);
  CHECK_THROWS_AS(belief_at(ps, 5), std::out_of_range);
  const auto b = belief(ps);
  CHECK(b == std::vector<double>{0.5, 0.25, 0.0, 0.25});
  ps.particles = {{1, 1.0}, {2, 0.0}};
  CHECK(effective_sample_size(ps) == doctest::Approx(1.0));
}

TEST_CASE("filter is reproducible from its seed") {
  const auto ep = fixtures::synthetic_episode(60);
  ParticleFilter a(ep, 500, 42), b(ep, 500, 42), c(ep, 500, 43);
  for (std::size_t t = 1; t <= 20; ++t) {
    a.step(ep.action(t), ep.observation(t));
    b.step(ep.action(t), ep.observation(t));
    c.step(ep.action(t), ep.observation(t));
  }
  CHECK(a.particles() == b.particles());
  CHECK_FALSE(a.particles() == c.particles());
}

TEST_CASE("init rejects empty inputs") {
  Rng rng(1);
  CHECK_THROWS_AS(init_particles(0, 10, rng), std::invalid_argument);
  CHECK_THROWS_AS(init_particles(10, 0, rng), std::invalid_argument);
}
