#include <vector>

#include "doctest.h"
#include "pfoe/policy.hpp"

using namespace pfoe;

namespace {

// a_t = (0.1 t, -t) so every successor action is distinguishable.
Episode ramp(std::size_t T) {
  Episode ep;
  for (std::size_t t = 1; t <= T; ++t) {
    ep.record({0.1 * static_cast<double>(t), -static_cast<double>(t)}, Observation{});
  }
  return ep;
}

ParticleSet set_of(std::size_t T, std::vector<Particle> ps) {
  ParticleSet s;
  s.episode_length = T;
  s.particles = std::move(ps);
  return s;
}

}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_policy("mode") == Policy::mode);
  CHECK(parse_policy("mean") == Policy::mean);
  CHECK(to_string(Policy::mean) == "mean");
  CHECK_THROWS_AS(parse_policy("median"), std::invalid_argument);
}

TEST_CASE("mode picks the heaviest index and its successor action") {
  const auto ep = ramp(6);
  const auto ps = set_of(6, {{2, 0.2}, {4, 0.3}, {4, 0.1}, {5, 0.4}});
  const auto m = mode_estimate(ps);
  CHECK(m.t == 4);
  CHECK(m.mass == doctest::Approx(0.4));
  const auto a = mode_policy(ps, ep);
  CHECK(a.v_linear == doctest::Approx(0.5));
  CHECK(a.v_angular == doctest::Approx(-5.0));
}

TEST_CASE("mode ties go to the smallest index") {
  const auto ps = set_of(6, {{5, 0.25}, {3, 0.25}, {1, 0.25}, {2, 0.25}});
  CHECK(mode_estimate(ps).t == 1);
}

TEST_CASE("mode ignores the last index") {
  const auto ep = ramp(5);
  const auto ps = set_of(5, {{5, 0.7}, {2, 0.3}});
  CHECK(mode_estimate(ps).t == 5);
  CHECK(mode_estimate(ps, 4).t == 2);
  CHECK(mode_policy(ps, ep).v_linear == doctest::Approx(0.3));
}

TEST_CASE("mode scratch buffer is returned zeroed") {
  const auto ps = set_of(4, {{1, 0.5}, {3, 0.5}});
  std::vector<double> scratch(5, 0.0);
  mode_estimate(ps, scratch);
  for (double x : scratch) CHECK(x == 0.0);
}

TEST_CASE("mean is renormalized over 1..T-1") {
  const auto ep = ramp(4);
  // Index 4 carries half the mass and has no successor.
  const auto ps = set_of(4, {{1, 0.25}, {2, 0.25}, {4, 0.5}});
  const auto a = mean_policy(ps, ep);
  CHECK(a.v_linear == doctest::Approx(0.5 * 0.2 + 0.5 * 0.3));
  CHECK(a.v_angular == doctest::Approx(-2.5));
  CHECK(mean_policy(set_of(4, {{4, 1.0}}), ep) == Action{});
}

TEST_CASE("mean cancels opposite successors") {
  Episode ep;
  ep.record({}, {});
  ep.record({0.2, 0.0}, {});
  ep.record({-0.2, 0.0}, {});
  ep.record({}, {});
  const auto a = mean_policy(set_of(4, {{1, 0.5}, {2, 0.5}}), ep);
  CHECK(a.v_linear == doctest::Approx(0.0));
}

TEST_CASE("policies reject mismatched inputs") {
  const auto ep = ramp(4);
  CHECK_THROWS_AS(mode_policy(set_of(5, {{1, 1.0}}), ep), std::invalid_argument);
  CHECK_THROWS_AS(mean_policy(set_of(1, {{1, 1.0}}), ramp(1)), std::invalid_argument);
}
