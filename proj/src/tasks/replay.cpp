#include "pfoe/tasks/replay.hpp"

namespace pfoe::tasks {

namespace {

using Clock = std::chrono::steady_clock;

}  // namespace

Replayer::Replayer(sim::Simulator& sim, const Episode& episode, const ReplayConfig& config)
    : sim_(&sim),
      episode_(&episode),
      policy_(config.policy),
      filter_(episode, config.particles, config.seed, config.filter),
      scratch_(episode.length() + 1, 0.0) {}

TraceStep Replayer::step(StepTimings* timings) {
  const Action executed = command_;
  sim_->apply(executed);
  const Observation z = sim_->sense();

  if (timings) {
    const auto t0 = Clock::now();
    filter_.motion_update();
    const auto t1 = Clock::now();
    filter_.measurement_update(z);
    const auto t2 = Clock::now();
    filter_.resample();
    const auto t3 = Clock::now();
    command_ = decide(policy_, filter_.particles(), *episode_, scratch_);
    const auto t4 = Clock::now();
    timings->motion += t1 - t0;
    timings->measurement += t2 - t1;
    timings->resampling += t3 - t2;
    timings->decision += t4 - t3;
    ++timings->steps;
  } else {
    filter_.step(executed, z);
    command_ = decide(policy_, filter_.particles(), *episode_, scratch_);
  }
  mode_ = mode_estimate(filter_.particles(), scratch_, episode_->length() - 1);

  ++step_;
  return TraceStep{step_, trial_, sim_->pose(), executed, z, mode_.t, mode_.mass, command_};
}

void Replayer::replace(const sim::Pose& pose) {
  sim_->teleport(pose);
  command_ = Action{};
}

Trace run_replay(sim::Simulator& sim, const Episode& episode, const ReplayConfig& config,
                 std::size_t steps) {
  Trace trace;
  trace.dt = sim.config().dt;
  sim.reset();
  Replayer replayer(sim, episode, config);
  trace.steps.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) trace.steps.push_back(replayer.step());
  return trace;
}

}  // namespace pfoe::tasks
