#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"
#include "pfoe/policy.hpp"
#include "pfoe/sim/simulator.hpp"
#include "pfoe/tasks/trace.hpp"

namespace pfoe::tasks {

struct ReplayConfig {
  Policy policy = Policy::mode;
  std::size_t particles = 1000;
  FilterConfig filter;
  std::uint64_t seed = 1;
};

/// Wall time spent in each procedure of the replay loop, accumulated.
struct StepTimings {
  std::chrono::nanoseconds motion{0};
  std::chrono::nanoseconds measurement{0};
  std::chrono::nanoseconds resampling{0};
  std::chrono::nanoseconds decision{0};
  std::size_t steps = 0;
};

/// Closed-loop replay: each cycle executes the pending command, observes,
/// updates the particle filter and picks the next command with the policy.
class Replayer {
 public:
  Replayer(sim::Simulator& sim, const Episode& episode, const ReplayConfig& config);

  TraceStep step(StepTimings* timings = nullptr);

  /// The trainer puts the robot somewhere by hand; wheels stop.
  void replace(const sim::Pose& pose);
  void set_trial(int trial) { trial_ = trial; }

  const ParticleFilter& filter() const { return filter_; }
  const Action& pending() const { return command_; }
  ModeEstimate mode() const { return mode_; }
  std::size_t steps() const { return step_; }

 private:
  sim::Simulator* sim_;
  const Episode* episode_;
  Policy policy_;
  ParticleFilter filter_;
  std::vector<double> scratch_;
  Action command_;
  ModeEstimate mode_;
  std::size_t step_ = 0;
  int trial_ = 0;
};

/// Runs `steps` replay cycles from the world's start pose.
Trace run_replay(sim::Simulator& sim, const Episode& episode, const ReplayConfig& config,
                 std::size_t steps);

}  // namespace pfoe::tasks
