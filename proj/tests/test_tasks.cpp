#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "pfoe/tasks/evaluate.hpp"
#include "pfoe/tasks/experiment.hpp"

using namespace pfoe;
using namespace pfoe::tasks;

namespace {

TraceStep at(double x, double y, double theta) {
  TraceStep s;
  s.pose = {x, y, theta};
  return s;
}

void hold(Trace& tr, const TraceStep& s, int n) {
  for (int i = 0; i < n; ++i) tr.steps.push_back(s);
}

// Drive up to the counting wall, swing `n` times, back off.
Trace counting_trace(int n) {
  Trace tr;
  for (double x = 0.0; x <= 0.43; x += 0.02) tr.steps.push_back(at(x, 0, 0));
  for (int k = 0; k < n; ++k) {
    tr.steps.push_back(at(0.43, 0, k % 2 ? -0.3 : 0.3));
    tr.steps.push_back(at(0.43, 0, k % 2 ? -0.7 : 0.7));
    tr.steps.push_back(at(0.43, 0, k % 2 ? -0.3 : 0.3));
    tr.steps.push_back(at(0.43, 0, 0.0));
  }
  for (double x = 0.43; x >= 0.1; x -= 0.02) tr.steps.push_back(at(x, 0, 0));
  return tr;
}

}  // namespace

TEST_CASE("counting evaluator counts swings per wall visit") {
  const auto world = sim::load_environment("counting_wall");
  for (int n : {1, 2, 5}) {
    const auto out = evaluate_counting(counting_trace(n), n, world);
    CHECK(out.label == Label::success);
    CHECK(out.metrics.at("count") == n);
    CHECK(evaluate_counting(counting_trace(n), n + 1, world).label == Label::failure);
  }
  // Two visits, the second one miscounted.
  auto tr = counting_trace(2);
  const auto second = counting_trace(3);
  tr.steps.insert(tr.steps.end(), second.steps.begin(), second.steps.end());
  const auto visits = wall_visits(tr, world);
  REQUIRE(visits.size() == 2);
  CHECK(visits[0].count == 2);
  CHECK(visits[1].count == 3);
  CHECK(evaluate_counting(tr, 2, world).label == Label::failure);
  // A visit that never leaves the wall is not complete.
  Trace stuck;
  hold(stuck, at(0.43, 0, 0), 10);
  CHECK(evaluate_counting(stuck, 1, world).label == Label::failure);
}

TEST_CASE("choice judge") {
  const auto world = sim::load_environment("choice_maze");
  Trace reach_a;
  for (double y = 0.0; y <= 0.48; y += 0.02) reach_a.steps.push_back(at(0, y, 1.57));
  for (double x = 0.0; x <= 0.72; x += 0.02) reach_a.steps.push_back(at(x, 0.48, 0));
  for (double y = 0.48; y <= 0.8; y += 0.02) reach_a.steps.push_back(at(0.72, y, 1.57));
  CHECK(evaluate_choice(reach_a, "A", world).label == Label::success);
  const auto wrong = evaluate_choice(reach_a, "B", world);
  CHECK(wrong.label == Label::mischoice);
  CHECK(wrong.metrics.at("pocket") == 0.0);

  Trace stalled;
  hold(stalled, at(0, 0.3, 1.57), 60);
  auto out = evaluate_choice(stalled, "A", world);
  CHECK(out.label == Label::dnf);
  CHECK(out.metrics.count("stalled") == 1);
  CHECK(out.metrics.at("seconds") == doctest::Approx(5.1));

  Trace slow;
  hold(slow, at(0, 0.3, 1.57), 30);
  out = evaluate_choice(slow, "A", world);
  CHECK(out.label == Label::dnf);
  CHECK(out.metrics.count("timeout") == 1);
}

TEST_CASE("stall events need a moving taught successor") {
  Episode ep;
  for (int t = 1; t <= 10; ++t) ep.record(t <= 5 ? Action{0.2, 0.0} : Action{}, Observation{});
  Trace tr;
  TraceStep s;
  s.mode_t = 2;  // successor a_3 moves
  hold(tr, s, 12);
  s.command = {0.2, 0.0};
  hold(tr, s, 3);
  s.command = {};
  s.mode_t = 7;  // successor a_8 is a pause
  hold(tr, s, 20);
  const auto events = stall_events(tr, ep);
  REQUIRE(events.size() == 1);
  CHECK(events[0].begin == 0);
  CHECK(events[0].end == 12);
  CHECK(count_stalls(tr.slice(0, 9), ep) == 0);
}

TEST_CASE("trace text round trip") {
  Trace tr;
  tr.dt = 0.1;
  TraceStep s;
  s.step = 1;
  s.trial = 2;
  s.pose = {0.1 + 0.2, -1.0 / 3.0, 2.5};
  s.action = {0.2, -1.5707963267948966};
  s.z = Observation{{1, 20, 300, 4000}};
  s.mode_t = 17;
  s.mode_mass = 0.123456789;
  s.command = {-0.2, 0.0};
  tr.steps = {s, s};
  tr.steps[1].step = 2;
  std::stringstream ss;
  write_trace(tr, ss);
  const auto back = read_trace(ss);
  CHECK(back == tr);
  CHECK(format_trace(back) == format_trace(tr));
}

TEST_CASE("scripted counting teacher counts correctly") {
  for (int n : {1, 3}) {
    const auto taught = teach_task({TaskKind::counting, n, 'A'}, 3, 5.0, true, 11);
    const auto world = sim::load_environment("counting_wall");
    const auto visits = wall_visits(taught.trace, world);
    int complete = 0;
    for (const auto& v : visits) {
      if (!v.complete) continue;
      ++complete;
      CHECK(v.count == n);
    }
    CHECK(complete == 3);
    CHECK(taught.trimmed.length() + 100 == taught.raw.length());
  }
}

TEST_CASE("scripted choice teacher ends in its pocket") {
  const auto world = sim::load_environment("choice_maze");
  for (char pocket : {'A', 'B', 'C'}) {
    const auto taught = teach_task({TaskKind::choice, 1, pocket}, 3, 5.0, true, 3);
    const auto last = taught.trace.steps.back().pose.position();
    CHECK(world.region_at(last) == std::string(1, pocket));
  }
}

TEST_CASE("task names") {
  CHECK(TaskSpec::parse("counting:4").count == 4);
  CHECK(TaskSpec::parse("choice:B").pocket == 'B');
  CHECK(TaskSpec::parse("choice:C").name() == "choice:C");
  CHECK(TaskSpec::parse("wall_follow").environment() == "rect_corridor");
  CHECK_THROWS(TaskSpec::parse("counting"));
  CHECK_THROWS(TaskSpec::parse("choice:D"));
  CHECK_THROWS(TaskSpec::parse("dance"));
  CHECK(parse_label("DNF") == Label::dnf);
  CHECK_THROWS_AS(parse_label("meh"), std::invalid_argument);
}

TEST_CASE("key states map to quantized actions") {
  CHECK(action_from_keys({}) == Action{});
  CHECK(action_from_keys({true, false, false, false}) == Action{0.2, 0.0});
  CHECK(action_from_keys({false, true, false, false}) == Action{-0.2, 0.0});
  CHECK(action_from_keys({true, false, true, false}) == Action{0.2, kTeachAngular});
  CHECK(action_from_keys({false, false, false, true}) == Action{0.0, -kTeachAngular});
  CHECK(action_from_keys({true, true, true, true}) == Action{});
}

TEST_CASE("experiment config parsing") {
  const auto c = parse_experiment_config(
      "# demo\ntask = choice\npockets = A, C\npolicies = mode, mean\nsets = 2\n"
      "trials = 3\nparticles = 500\ndelta = 0.2\nseed = 9\nnoise = none\n");
  CHECK(c.task == TaskKind::choice);
  CHECK(c.pockets == std::vector<char>{'A', 'C'});
  CHECK(c.policies.size() == 2);
  CHECK(c.sets == 2);
  CHECK(c.particles == 500);
  CHECK(c.delta == 0.2);
  CHECK(c.seed == 9);
  CHECK_FALSE(c.noise);

  auto message = [](const std::string& text) -> std::string {
    try {
      parse_experiment_config(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("sets = 2\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(message("sets = -1\n") != "");
  CHECK(message("delta = 2\n") != "");
  CHECK(message("counts = 1, x\n") != "");
  CHECK(message("task\n") != "");

  ExperimentConfig d;
  apply_setting(d, "trials", "4");
  CHECK(d.trials == 4);
  CHECK_THROWS_AS(apply_setting(d, "nope", "1"), ConfigError);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
}

TEST_CASE("experiment results do not depend on the thread count") {
  ExperimentConfig c;
  c.counts = {1, 2};
  c.policies = {Policy::mode, Policy::mean};
  c.sets = 2;
  c.trials = 2;
  const auto one = run_experiment(c);
  c.threads = 3;
  const auto three = run_experiment(c);
  REQUIRE(one.rows.size() == 16);
  REQUIRE(three.rows.size() == one.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].variant == three.rows[i].variant);
    CHECK(one.rows[i].outcome == three.rows[i].outcome);
  }
  std::ostringstream rows;
  write_rows(one, rows);
  const auto text = rows.str();
  CHECK(std::count(text.begin(), text.end(), '\n') >= 16);
  CHECK(format_report(one).find("counting") != std::string::npos);
  c.trials = 0;
  CHECK(run_experiment(c).rows.empty());
}

TEST_CASE("replay is reproducible") {
  const auto taught = teach_task({TaskKind::counting, 2, 'A'}, 3, 5.0, true, 5);
  auto run = [&](std::uint64_t seed) {
    sim::Simulator sim(sim::load_environment("counting_wall"), sim_config(true), 8);
    ReplayConfig rc;
    rc.seed = seed;
    return format_trace(run_replay(sim, taught.trimmed, rc, 300));
  };
  CHECK(run(1) == run(1));
  CHECK(run(1) != run(2));
}

TEST_CASE("mode replay of a counting episode counts correctly") {
  const auto taught = teach_task({TaskKind::counting, 2, 'A'}, 3, 5.0, true, 5);
  ReplayConfig rc;
  const auto r = replay_counting(taught.trimmed, 2, 5, rc, true, 3, taught.trimmed.length());
  REQUIRE(r.trials.size() == 5);
  int ok = 0;
  for (const auto& t : r.trials) ok += t.label == Label::success;
  CHECK(ok >= 4);
}

TEST_CASE("noise-free replay can get trapped at the end of the episode") {
  // The trimmed episode stops mid-swing at the wall. Without sensor noise the
  // robot reproduces the last reading exactly and the mode settles there.
  const auto taught = teach_task({TaskKind::counting, 2, 'A'}, 3, 5.0, false, 5);
  ReplayConfig rc;
  const auto r = replay_counting(taught.trimmed, 2, 5, rc, false, 3, taught.trimmed.length());
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.steps.back().mode_t == taught.trimmed.length() - 1);
  CHECK(r.trace.steps.back().command == Action{});
}
