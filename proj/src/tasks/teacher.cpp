#include "pfoe/tasks/teacher.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfoe::tasks {

using sim::normalize_angle;
using sim::Pose;
using sim::Vec2;
using sim::WorldMap;

TaskSpec TaskSpec::parse(std::string_view text) {
  TaskSpec spec;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "counting") {
    spec.kind = TaskKind::counting;
    if (arg.empty()) throw std::invalid_argument("counting task needs a count: counting:<n>");
    int n = 0;
    for (char c : arg) {
      if (c < '0' || c > '9') throw std::invalid_argument("bad count in task '" + std::string(text) + "'");
      n = n * 10 + (c - '0');
      if (n > 1000) throw std::invalid_argument("count too large");
    }
    if (n < 1) throw std::invalid_argument("count must be >= 1");
    spec.count = n;
  } else if (head == "choice") {
    spec.kind = TaskKind::choice;
    if (arg.size() != 1 || (arg[0] != 'A' && arg[0] != 'B' && arg[0] != 'C')) {
      throw std::invalid_argument("choice task needs a pocket: choice:<A|B|C>");
    }
    spec.pocket = arg[0];
  } else if (head == "wall_follow" && arg.empty()) {
    spec.kind = TaskKind::wall_follow;
  } else if (head == "rect_corridor" && arg.empty()) {
    spec.kind = TaskKind::rect_corridor;
  } else {
    throw std::invalid_argument("unknown task '" + std::string(text) +
                                "' (expected counting:<n>, choice:<A|B|C>, wall_follow, "
                                "rect_corridor)");
  }
  return spec;
}

std::string TaskSpec::name() const {
  switch (kind) {
    case TaskKind::counting: return "counting:" + std::to_string(count);
    case TaskKind::choice: return std::string("choice:") + pocket;
    case TaskKind::wall_follow: return "wall_follow";
    case TaskKind::rect_corridor: return "rect_corridor";
  }
  return {};
}

std::string_view TaskSpec::environment() const {
  switch (kind) {
    case TaskKind::counting: return "counting_wall";
    case TaskKind::choice: return "choice_maze";
    case TaskKind::wall_follow:
    case TaskKind::rect_corridor: return "rect_corridor";
  }
  return {};
}

Action action_from_keys(const KeyState& keys) {
  Action a;
  if (keys.up != keys.down) a.v_linear = keys.up ? kTeachLinear : -kTeachLinear;
  if (keys.left != keys.right) a.v_angular = keys.left ? kTeachAngular : -kTeachAngular;
  return a;
}

namespace {

constexpr double kDeg = sim::kPi / 180.0;
constexpr double kTurnTolerance = 4.5 * kDeg;  // half of one quantized turn step
constexpr double kHoldTolerance = 6.0 * kDeg;

Action forward() { return {kTeachLinear, 0.0}; }
Action turn(double sign) { return {0.0, sign * kTeachAngular}; }

/// Heading that points from p at the nearest wall point.
double wall_normal_heading(const Pose& pose, const WorldMap& world) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 target = pose.position();
  for (const auto& s : world.segments) {
    const Vec2 c = sim::closest_point(s, pose.position());
    const double d = (c - pose.position()).norm();
    if (d < best) {
      best = d;
      target = c;
    }
  }
  const Vec2 d = target - pose.position();
  return std::atan2(d.y, d.x);
}

class Phase {
 public:
  virtual ~Phase() = default;
  /// nullopt when the phase is over; the caller then moves to the next one.
  virtual std::optional<TeacherCommand> step(const Pose& pose, const WorldMap& world) = 0;
};

class Idle final : public Phase {
 public:
  explicit Idle(int steps) : left_(steps) {}
  std::optional<TeacherCommand> step(const Pose&, const WorldMap&) override {
    if (left_-- <= 0) return std::nullopt;
    return TeacherCommand{};
  }

 private:
  int left_;
};

class Replace final : public Phase {
 public:
  explicit Replace(Pose target) : target_(target) {}
  std::optional<TeacherCommand> step(const Pose&, const WorldMap&) override {
    if (done_) return std::nullopt;
    done_ = true;
    return TeacherCommand{Action{}, target_};
  }

 private:
  Pose target_;
  bool done_ = false;
};

/// Turns in place toward a heading computed when the phase starts.
class TurnTo final : public Phase {
 public:
  using Target = std::function<double(const Pose&, const WorldMap&)>;
  explicit TurnTo(Target target) : target_(std::move(target)) {}
  std::optional<TeacherCommand> step(const Pose& pose, const WorldMap& world) override {
    if (!heading_) heading_ = target_(pose, world);
    const double err = normalize_angle(*heading_ - pose.theta);
    if (std::abs(err) < kTurnTolerance || ++steps_ > 200) return std::nullopt;
    return TeacherCommand{turn(err > 0 ? 1.0 : -1.0), std::nullopt};
  }

 private:
  Target target_;
  std::optional<double> heading_;
  int steps_ = 0;
};

/// Drives straight until `done` holds, tapping a turn key when the heading
/// drifts from the one held at the start.
class Drive final : public Phase {
 public:
  using Until = std::function<bool(const Pose&, const WorldMap&)>;
  Drive(double direction, Until done, int max_steps = 400)
      : direction_(direction), done_(std::move(done)), max_steps_(max_steps) {}
  std::optional<TeacherCommand> step(const Pose& pose, const WorldMap& world) override {
    if (!hold_) hold_ = pose.theta;
    if (done_(pose, world) || ++steps_ > max_steps_) return std::nullopt;
    Action a{direction_ * kTeachLinear, 0.0};
    const double err = normalize_angle(*hold_ - pose.theta);
    if (std::abs(err) > kHoldTolerance) a.v_angular = err > 0 ? kTeachAngular : -kTeachAngular;
    return TeacherCommand{a, std::nullopt};
  }

 private:
  double direction_;
  Until done_;
  int max_steps_;
  std::optional<double> hold_;
  int steps_ = 0;
};

/// Drives forward keeping a wall on one side at about `distance`, steering
/// with turn-key taps while moving.
class FollowWall final : public Phase {
 public:
  using Until = std::function<bool(const Pose&, const WorldMap&)>;
  FollowWall(double side, double distance, Until done)
      : side_(side), distance_(distance), done_(std::move(done)) {}
  std::optional<TeacherCommand> step(const Pose& pose, const WorldMap& world) override {
    if (!heading_) heading_ = pose.theta;
    if (done_(pose, world) || ++steps_ > 600) return std::nullopt;
    // side = -1: wall on the right.
    const double probe = pose.theta + side_ * sim::kPi / 2.0;
    const auto d = world.cast(pose.position(), probe, 1.0).value_or(1.0);
    const double err = normalize_angle(*heading_ - pose.theta);
    Action a = forward();
    if (d > distance_ + 0.02 && side_ * err >= -kHoldTolerance) {
      a.v_angular = side_ * kTeachAngular;  // steer toward the wall
    } else if (d < distance_ - 0.02 && side_ * err <= kHoldTolerance) {
      a.v_angular = -side_ * kTeachAngular;
    } else if (std::abs(err) > kHoldTolerance) {
      a.v_angular = err > 0 ? kTeachAngular : -kTeachAngular;
    }
    return TeacherCommand{a, std::nullopt};
  }

 private:
  double side_;
  double distance_;
  Until done_;
  std::optional<double> heading_;
  int steps_ = 0;
};

class PhasedTeacher final : public Teacher {
 public:
  void add(std::unique_ptr<Phase> p) { phases_.push_back(std::move(p)); }

  std::optional<TeacherCommand> next(const Pose& pose, const WorldMap& world) override {
    while (!phases_.empty()) {
      if (auto cmd = phases_.front()->step(pose, world)) return cmd;
      phases_.pop_front();
    }
    return std::nullopt;
  }

 private:
  std::deque<std::unique_ptr<Phase>> phases_;
};

class Jitter {
 public:
  explicit Jitter(std::uint64_t seed) : rng_(seed) {}
  int steps(int lo, int hi) {
    return lo + static_cast<int>(uniform_index(rng_, static_cast<std::size_t>(hi - lo + 1))) - 1;
  }
  double real(double lo, double hi) { return lo + (hi - lo) * uniform01(rng_); }

 private:
  Rng rng_;
};

template <class P, class... Args>
std::unique_ptr<Phase> make(Args&&... args) {
  return std::make_unique<P>(std::forward<Args>(args)...);
}

constexpr double kRadius = 0.06;

// Time before the trainer starts driving and after the last cycle. The
// counting trainer goes straight into its cycles, so the trim cuts into them.
void add_margin(PhasedTeacher& t, TaskKind kind, Jitter& j) {
  if (kind == TaskKind::counting) {
    t.add(make<Idle>(j.steps(3, 12)));
  } else {
    t.add(make<Idle>(j.steps(42, 58)));
  }
}

void build_counting(PhasedTeacher& t, int n, int cycles, Jitter& j) {
  for (int c = 0; c < cycles; ++c) {
    t.add(make<Drive>(1.0, [](const Pose& p, const WorldMap& w) {
      return w.clearance(p.position()) <= kRadius + 1e-3;
    }));
    t.add(make<Drive>(1.0, [k = j.steps(1, 3)](const Pose&, const WorldMap&) mutable {
      return k-- <= 0;
    }));
    t.add(make<Idle>(j.steps(2, 4)));
    for (int s = 0; s < n; ++s) {
      const double side = s % 2 == 0 ? 1.0 : -1.0;  // left first, then alternate
      const double amplitude = j.real(40.0, 50.0) * kDeg;
      t.add(make<TurnTo>([side, amplitude](const Pose& p, const WorldMap& w) {
        return wall_normal_heading(p, w) + side * amplitude;
      }));
      t.add(make<Idle>(j.steps(0, 2)));
      t.add(make<TurnTo>(
          [](const Pose& p, const WorldMap& w) { return wall_normal_heading(p, w); }));
      t.add(make<Idle>(j.steps(1, 3)));
    }
    const double back_to = 0.5 + j.real(-0.02, 0.02);
    t.add(make<Drive>(-1.0, [back_to](const Pose& p, const WorldMap& w) {
      return w.clearance(p.position()) >= back_to;
    }));
    t.add(make<Idle>(j.steps(0, 2)));
  }
}

void build_choice(PhasedTeacher& t, char pocket, int runs, const WorldMap& world, Jitter& j) {
  for (int r = 0; r < runs; ++r) {
    if (r > 0) {
      t.add(make<Replace>(world.start));
      t.add(make<Idle>(j.steps(8, 15)));
    }
    const double corner_y = 0.48 + j.real(-0.015, 0.015);
    t.add(make<Drive>(1.0, [corner_y](const Pose& p, const WorldMap&) { return p.y >= corner_y; }));
    t.add(make<Idle>(j.steps(1, 3)));
    t.add(make<TurnTo>([](const Pose&, const WorldMap&) { return 0.0; }));
    t.add(make<Idle>(j.steps(1, 3)));
    const double junction_x = 0.72 + j.real(-0.015, 0.015);
    t.add(make<Drive>(1.0,
                      [junction_x](const Pose& p, const WorldMap&) { return p.x >= junction_x; }));
    switch (pocket) {
      case 'A': {
        t.add(make<Idle>(j.steps(1, 3)));
        t.add(make<TurnTo>([](const Pose&, const WorldMap&) { return sim::kPi / 2.0; }));
        t.add(make<Idle>(j.steps(1, 3)));
        const double end_y = 0.96 + j.real(-0.02, 0.02);
        t.add(make<Drive>(1.0, [end_y](const Pose& p, const WorldMap&) { return p.y >= end_y; }));
        break;
      }
      case 'B': {
        const double end_x = 1.20 + j.real(-0.02, 0.02);
        t.add(make<Drive>(1.0, [end_x](const Pose& p, const WorldMap&) { return p.x >= end_x; }));
        break;
      }
      default: {
        t.add(make<Idle>(j.steps(1, 3)));
        t.add(make<TurnTo>([](const Pose&, const WorldMap&) { return -sim::kPi / 2.0; }));
        t.add(make<Idle>(j.steps(1, 3)));
        const double end_y = 0.0 + j.real(-0.02, 0.02);
        t.add(make<Drive>(1.0, [end_y](const Pose& p, const WorldMap&) { return p.y <= end_y; }));
        break;
      }
    }
    // The trainer lets the robot sit at the end before picking it up.
    t.add(make<Idle>(j.steps(20, 30)));
  }
}

void build_wall_follow(PhasedTeacher& t, int cycles, const WorldMap& world, Jitter& j) {
  for (int c = 0; c < cycles; ++c) {
    if (c > 0) {
      t.add(make<Replace>(world.start));
      t.add(make<Idle>(j.steps(8, 15)));
    }
    const double goal_x = 1.55 + j.real(-0.03, 0.03);
    t.add(make<FollowWall>(-1.0, 0.12 + j.real(-0.01, 0.01),
                           [goal_x](const Pose& p, const WorldMap&) { return p.x >= goal_x; }));
    t.add(make<Idle>(j.steps(10, 20)));
  }
}

void build_rect_corridor(PhasedTeacher& t, int cycles, Jitter& j) {
  auto heading = [](double h) {
    return [h](const Pose&, const WorldMap&) { return h; };
  };
  for (int c = 0; c < cycles; ++c) {
    // B: east along the south wall, wall on the right.
    const double b_end = 1.2 + j.real(-0.04, 0.04);
    t.add(make<FollowWall>(-1.0, 0.12, [b_end](const Pose& p, const WorldMap&) {
      return p.x >= b_end;
    }));
    t.add(make<TurnTo>(heading(sim::kPi / 2.0)));
    // C: cross to the north wall.
    const double c_end = 0.88 + j.real(-0.02, 0.02);
    t.add(make<Drive>(1.0, [c_end](const Pose& p, const WorldMap&) { return p.y >= c_end; }));
    t.add(make<TurnTo>(heading(sim::kPi)));
    // D: west along the north wall, wall on the right.
    const double d_end = 0.2 + j.real(-0.04, 0.04);
    t.add(make<FollowWall>(-1.0, 0.12, [d_end](const Pose& p, const WorldMap&) {
      return p.x <= d_end;
    }));
    t.add(make<TurnTo>(heading(-sim::kPi / 2.0)));
    // A: cross back south.
    const double a_end = 0.12 + j.real(-0.02, 0.02);
    t.add(make<Drive>(1.0, [a_end](const Pose& p, const WorldMap&) { return p.y <= a_end; }));
    t.add(make<TurnTo>(heading(0.0)));
  }
}

}  // namespace

std::unique_ptr<Teacher> scripted_teacher(const TaskSpec& task, int cycles, std::uint64_t seed) {
  if (cycles < 0) throw std::invalid_argument("cycles must be >= 0");
  auto teacher = std::make_unique<PhasedTeacher>();
  if (cycles == 0) return teacher;
  Jitter j(seed);
  const WorldMap world = sim::load_environment(task.environment());
  add_margin(*teacher, task.kind, j);
  switch (task.kind) {
    case TaskKind::counting: build_counting(*teacher, task.count, cycles, j); break;
    case TaskKind::choice: build_choice(*teacher, task.pocket, cycles, world, j); break;
    case TaskKind::wall_follow: build_wall_follow(*teacher, cycles, world, j); break;
    case TaskKind::rect_corridor: build_rect_corridor(*teacher, cycles, j); break;
  }
  add_margin(*teacher, task.kind, j);
  return teacher;
}

TeachingResult teach(sim::Simulator& sim, Teacher& teacher, std::size_t max_steps) {
  TeachingResult result;
  result.episode = Episode(sim.config().dt);
  result.trace.dt = sim.config().dt;
  for (std::size_t step = 1; step <= max_steps; ++step) {
    auto cmd = teacher.next(sim.pose(), sim.world());
    if (!cmd) break;
    if (cmd->teleport) sim.teleport(*cmd->teleport);
    sim.apply(cmd->action);
    const Observation z = sim.sense();
    result.episode.record(cmd->action, z);
    result.stream.push_back(*cmd);
    result.trace.steps.push_back(
        TraceStep{step, 0, sim.pose(), cmd->action, z, 0, 0.0, cmd->action});
  }
  return result;
}

Trace execute_stream(sim::Simulator& sim, const std::vector<TeacherCommand>& stream) {
  Trace trace;
  trace.dt = sim.config().dt;
  std::size_t step = 0;
  for (const auto& cmd : stream) {
    if (cmd.teleport) sim.teleport(*cmd.teleport);
    sim.apply(cmd.action);
    const Observation z = sim.sense();
    trace.steps.push_back(TraceStep{++step, 0, sim.pose(), cmd.action, z, 0, 0.0, cmd.action});
  }
  return trace;
}

}  // namespace pfoe::tasks
