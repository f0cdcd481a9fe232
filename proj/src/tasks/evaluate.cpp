#include "pfoe/tasks/evaluate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfoe::tasks {

using sim::Vec2;

std::string_view to_string(Label label) {
  switch (label) {
    case Label::success: return "success";
    case Label::failure: return "failure";
    case Label::dnf: return "DNF";
    case Label::mischoice: return "mischoice";
  }
  return "failure";
}

Label parse_label(std::string_view text) {
  if (text == "success") return Label::success;
  if (text == "failure") return Label::failure;
  if (text == "DNF") return Label::dnf;
  if (text == "mischoice") return Label::mischoice;
  throw std::invalid_argument("unknown outcome label '" + std::string(text) + "'");
}

namespace {

double normal_heading(Vec2 p, const sim::WorldMap& world) {
  double best = std::numeric_limits<double>::infinity();
  Vec2 target = p;
  for (const auto& s : world.segments) {
    const Vec2 c = sim::closest_point(s, p);
    const double d = (c - p).norm();
    if (d < best) {
      best = d;
      target = c;
    }
  }
  const Vec2 d = target - p;
  return std::atan2(d.y, d.x);
}

}  // namespace

std::vector<WallVisit> wall_visits(const Trace& trace, const sim::WorldMap& world,
                                   const CountingParams& params) {
  std::vector<WallVisit> visits;
  std::optional<WallVisit> cur;
  bool aligned = false;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& pose = trace.steps[i].pose;
    const double d = world.clearance(pose.position());
    if (!cur && d <= params.near) {
      cur = WallVisit{i, i, 0, false};
      const double phi = sim::normalize_angle(pose.theta - normal_heading(pose.position(), world));
      aligned = std::abs(phi) < params.swing_off;
    }
    if (!cur) continue;
    if (d <= params.gate) {
      const double phi = sim::normalize_angle(pose.theta - normal_heading(pose.position(), world));
      if (aligned && std::abs(phi) > params.swing_on) {
        ++cur->count;
        aligned = false;
      } else if (!aligned && std::abs(phi) < params.swing_off) {
        aligned = true;
      }
    }
    if (d >= params.far) {
      cur->end = i;
      cur->complete = true;
      visits.push_back(*cur);
      cur.reset();
    }
  }
  if (cur) {
    cur->end = trace.steps.size();
    visits.push_back(*cur);
  }
  return visits;
}

TrialOutcome evaluate_counting(const Trace& trace, int n, const sim::WorldMap& world,
                               const CountingParams& params) {
  TrialOutcome out;
  out.label = Label::failure;
  out.metrics["count"] = 0.0;
  out.metrics["cycles"] = 0.0;
  int complete = 0;
  bool all_match = true;
  for (const auto& v : wall_visits(trace, world, params)) {
    if (!v.complete) continue;
    ++complete;
    out.metrics["count_" + std::to_string(complete)] = v.count;
    out.metrics["count"] = v.count;
    all_match = all_match && v.count == n;
  }
  out.metrics["cycles"] = complete;
  if (complete > 0 && all_match) out.label = Label::success;
  return out;
}

ChoiceJudge::ChoiceJudge(std::string target, const sim::WorldMap& world, double dt,
                         ChoiceParams params)
    : target_(std::move(target)), world_(&world), dt_(dt), params_(std::move(params)) {}

std::optional<TrialOutcome> ChoiceJudge::feed(const TraceStep& step) {
  ++steps_;
  const Vec2 p = step.pose.position();
  for (const auto& name : params_.pockets) {
    const auto* r = world_->region(name);
    if (r && r->contains(p)) {
      TrialOutcome out;
      out.label = name == target_ ? Label::success : Label::mischoice;
      out.metrics["seconds"] = static_cast<double>(steps_) * dt_;
      out.metrics["pocket"] = static_cast<double>(name[0] - 'A');
      return out;
    }
  }
  if (last_) {
    const double speed = (p - last_->position()).norm() / dt_;
    const double turn = std::abs(sim::normalize_angle(step.pose.theta - last_->theta)) / dt_;
    stalled_ = (speed < params_.stall_speed && turn < params_.stall_angular) ? stalled_ + 1 : 0;
  }
  last_ = step.pose;
  if (static_cast<double>(stalled_) * dt_ >= params_.stall_seconds - 1e-9) {
    TrialOutcome out;
    out.label = Label::dnf;
    out.metrics["seconds"] = static_cast<double>(steps_) * dt_;
    out.metrics["stalled"] = 1.0;
    return out;
  }
  return std::nullopt;
}

TrialOutcome ChoiceJudge::finish() const {
  TrialOutcome out;
  out.label = Label::dnf;
  out.metrics["seconds"] = static_cast<double>(steps_) * dt_;
  out.metrics["timeout"] = 1.0;
  return out;
}

TrialOutcome evaluate_choice(const Trace& trace, const std::string& target_pocket,
                             const sim::WorldMap& world, const ChoiceParams& params) {
  ChoiceJudge judge(target_pocket, world, trace.dt, params);
  for (const auto& s : trace.steps) {
    if (auto out = judge.feed(s)) return *out;
  }
  return judge.finish();
}

TrialOutcome evaluate_wall_follow(const Trace& trace, const sim::WorldMap& world,
                                  const ChoiceParams& params) {
  ChoiceParams p = params;
  p.pockets = {"goal"};
  auto out = evaluate_choice(trace, "goal", world, p);
  if (out.label != Label::success) out.label = Label::failure;
  out.metrics.erase("pocket");
  return out;
}

TrialOutcome evaluate_rect_corridor(const Trace& trace, const sim::WorldMap& world) {
  // Sequence of interval names the robot passes through, with durations.
  std::vector<std::pair<std::string, std::size_t>> runs;
  for (const auto& s : trace.steps) {
    std::string in;
    for (const char* name : {"A", "B", "C", "D"}) {
      const auto* r = world.region(name);
      if (r && r->contains(s.pose.position())) {
        in = name;
        break;
      }
    }
    if (in.empty()) continue;
    if (runs.empty() || runs.back().first != in) {
      runs.emplace_back(in, 1);
    } else {
      ++runs.back().second;
    }
  }
  TrialOutcome out;
  int laps = 0;
  int b_count = 0;
  int d_count = 0;
  // A lap is the ordered pattern B C D A.
  static const std::array<std::string_view, 4> kOrder{"B", "C", "D", "A"};
  std::size_t expect = 0;
  for (const auto& [name, len] : runs) {
    if (name == "B") out.metrics["B_" + std::to_string(++b_count)] = len * trace.dt;
    if (name == "D") out.metrics["D_" + std::to_string(++d_count)] = len * trace.dt;
    if (name == kOrder[expect]) {
      expect = (expect + 1) % kOrder.size();
      if (expect == 0) ++laps;
    } else {
      expect = name == "B" ? 1 : 0;
    }
  }
  out.metrics["laps"] = laps;
  out.label = laps >= 1 ? Label::success : Label::failure;
  return out;
}

std::vector<StallEvent> stall_events(const Trace& trace, const Episode& episode,
                                     const StallParams& params) {
  const auto min_steps = static_cast<std::size_t>(std::ceil(params.min_seconds / trace.dt - 1e-9));
  std::vector<StallEvent> events;
  std::size_t run = 0;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    const bool quiet = std::abs(s.command.v_linear) < params.linear &&
                       std::abs(s.command.v_angular) < params.angular;
    bool taught_motion = false;
    if (s.mode_t >= 1 && s.mode_t < episode.length()) {
      const Action& next = episode.action(s.mode_t + 1);
      taught_motion = std::abs(next.v_linear) >= params.linear ||
                      std::abs(next.v_angular) >= params.angular;
    }
    if (quiet && taught_motion) {
      if (++run == std::max<std::size_t>(min_steps, 1)) events.push_back({i + 1 - run, i + 1});
      if (run > min_steps) events.back().end = i + 1;
    } else {
      run = 0;
    }
  }
  return events;
}

int count_stalls(const Trace& trace, const Episode& episode, const StallParams& params) {
  return static_cast<int>(stall_events(trace, episode, params).size());
}

}  // namespace pfoe::tasks
