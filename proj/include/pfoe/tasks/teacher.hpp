#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfoe/episode.hpp"
#include "pfoe/filter.hpp"
#include "pfoe/sim/simulator.hpp"
#include "pfoe/tasks/trace.hpp"

namespace pfoe::tasks {

enum class TaskKind { counting, choice, wall_follow, rect_corridor };

/// A task and its parameter: `counting:<n>`, `choice:<A|B|C>`, `wall_follow`,
/// `rect_corridor`.
struct TaskSpec {
  TaskKind kind = TaskKind::counting;
  int count = 1;
  char pocket = 'A';

  static TaskSpec parse(std::string_view text);
  std::string name() const;
  /// Name of the built-in environment the task runs in.
  std::string_view environment() const;
};

/// Teacher action quantization: up = +0.2 m/s, down = -0.2 m/s,
/// left/right = +/- pi/2 rad/s, combinable.
inline constexpr double kTeachLinear = 0.2;
inline constexpr double kTeachAngular = 1.5707963267948966;

struct KeyState {
  bool up = false;
  bool down = false;
  bool left = false;
  bool right = false;

  friend bool operator==(const KeyState&, const KeyState&) = default;
};

Action action_from_keys(const KeyState& keys);

/// One teaching cycle: optionally move the robot (the trainer replacing it by
/// hand, recording continues), then execute the action.
struct TeacherCommand {
  Action action;
  std::optional<sim::Pose> teleport;
};

/// A scripted trainer. Like a human with a game controller it watches the
/// robot (the true pose) and emits quantized commands, one per cycle.
class Teacher {
 public:
  virtual ~Teacher() = default;
  /// nullopt once the script is finished.
  virtual std::optional<TeacherCommand> next(const sim::Pose& pose, const sim::WorldMap& world) = 0;
};

/// Builds the scripted trainer for a task. Timing and target jitter are drawn
/// from the seed to emulate human variation. Scripts start and end with a few
/// seconds of idling (preparation and finishing).
std::unique_ptr<Teacher> scripted_teacher(const TaskSpec& task, int cycles, std::uint64_t seed);

struct TeachingResult {
  std::vector<TeacherCommand> stream;
  Episode episode;  // untrimmed
  Trace trace;
};

/// Runs a teacher to completion in the simulator and records e_t = (a_t, z_t)
/// every cycle. `max_steps` guards against scripts that never finish.
TeachingResult teach(sim::Simulator& sim, Teacher& teacher, std::size_t max_steps = 100000);

/// Executes a recorded stream open-loop (teleports included).
Trace execute_stream(sim::Simulator& sim, const std::vector<TeacherCommand>& stream);

}  // namespace pfoe::tasks
