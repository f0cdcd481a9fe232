#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/sim/world.hpp"
#include "pfoe/tasks/trace.hpp"

namespace pfoe::tasks {

enum class Label { success, failure, dnf, mischoice };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

struct TrialOutcome {
  Label label = Label::failure;
  std::map<std::string, double> metrics;

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

// ---- counting -------------------------------------------------------------

/// Swing detection around a wall. A visit starts when the robot center comes
/// within `near` of a wall and ends when it gets farther than `far`. While
/// within `gate`, a count is registered each time the heading leaves the wall
/// normal by more than `swing_on` after having been within `swing_off`.
struct CountingParams {
  double near = 0.09;
  double gate = 0.15;
  double far = 0.30;
  double swing_on = 0.44;   // rad, about 25 deg
  double swing_off = 0.21;  // rad, about 12 deg
};

struct WallVisit {
  std::size_t begin = 0;  // index of the first step within `near`
  std::size_t end = 0;    // index of the step at which the robot passed `far`
  int count = 0;
  bool complete = false;
};

std::vector<WallVisit> wall_visits(const Trace& trace, const sim::WorldMap& world,
                                   const CountingParams& params = {});

/// Success iff the trace holds at least one complete visit and every complete
/// visit counted exactly n.
TrialOutcome evaluate_counting(const Trace& trace, int n, const sim::WorldMap& world,
                               const CountingParams& params = {});

// ---- choice ---------------------------------------------------------------

struct ChoiceParams {
  double stall_speed = 0.01;    // m/s
  double stall_angular = 0.05;  // rad/s
  double stall_seconds = 5.0;
  std::vector<std::string> pockets{"A", "B", "C"};
};

/// Incremental judge: feed steps in order until it returns an outcome.
class ChoiceJudge {
 public:
  ChoiceJudge(std::string target, const sim::WorldMap& world, double dt, ChoiceParams params = {});
  std::optional<TrialOutcome> feed(const TraceStep& step);
  /// Outcome when the trace ends undecided (DNF by timeout).
  TrialOutcome finish() const;

 private:
  std::string target_;
  const sim::WorldMap* world_;
  double dt_;
  ChoiceParams params_;
  std::optional<sim::Pose> last_;
  std::size_t stalled_ = 0;
  std::size_t steps_ = 0;
};

TrialOutcome evaluate_choice(const Trace& trace, const std::string& target_pocket,
                             const sim::WorldMap& world, const ChoiceParams& params = {});

// ---- wall following / corridor --------------------------------------------

/// Success when the robot center reaches the `goal` region before stalling.
TrialOutcome evaluate_wall_follow(const Trace& trace, const sim::WorldMap& world,
                                  const ChoiceParams& params = {});

/// Laps around the A-B-C-D loop and the time spent in each B and D interval.
TrialOutcome evaluate_rect_corridor(const Trace& trace, const sim::WorldMap& world);

// ---- stalls ---------------------------------------------------------------

struct StallParams {
  double linear = 0.02;   // m/s
  double angular = 0.05;  // rad/s
  double min_seconds = 1.0;
};

/// A run of steps [begin, end) of the trace.
struct StallEvent {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Runs of near-zero commands lasting at least min_seconds during which the
/// action taught after the mode is not itself a pause.
std::vector<StallEvent> stall_events(const Trace& trace, const Episode& episode,
                                     const StallParams& params = {});
int count_stalls(const Trace& trace, const Episode& episode, const StallParams& params = {});

}  // namespace pfoe::tasks
