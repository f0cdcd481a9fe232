#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/sim/world.hpp"

namespace pfoe::tasks {

/// One control cycle. `action` was executed during the cycle and `pose`/`z`
/// are the state and observation after it; `command` is the action chosen for
/// the next cycle. mode_t is 0 when no filter is running (teaching).
struct TraceStep {
  std::size_t step = 0;
  int trial = 0;
  sim::Pose pose;
  Action action;
  Observation z;
  std::size_t mode_t = 0;
  double mode_mass = 0.0;
  Action command;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct Trace {
  std::vector<TraceStep> steps;
  double dt = 0.1;

  bool empty() const { return steps.empty(); }
  std::size_t size() const { return steps.size(); }
  Trace slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

// Text format:
//   pfoe-trace v1 dt=<seconds>
//   step trial x y theta v_linear v_angular z_lf z_ls z_rs z_rf mode_t mode_mass cmd_linear cmd_angular
void write_trace(const Trace& trace, std::ostream& out);
std::string format_trace(const Trace& trace);
Trace read_trace(std::istream& in);
void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

}  // namespace pfoe::tasks
