// pfoe: teach, replay, experiment, bench, inspect and serve.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "pfoe/bench.hpp"
#include "pfoe/bridge/server.hpp"
#include "pfoe/tasks/experiment.hpp"

namespace {

using namespace pfoe;
using namespace pfoe::tasks;

constexpr int kRuntimeFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

TaskSpec parse_task(const std::string& text) {
  try {
    return TaskSpec::parse(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

bool parse_noise(const std::string& text) {
  if (text == "default") return true;
  if (text == "none") return false;
  throw UsageError("--noise must be 'default' or 'none'");
}

// A task to drive an environment's replay when none was given.
TaskSpec task_for_env(const std::string& env) {
  if (env == "counting_wall") return {TaskKind::counting, 1, 'A'};
  if (env == "choice_maze") return {TaskKind::choice, 1, 'A'};
  if (env == "rect_corridor") return {TaskKind::rect_corridor, 1, 'A'};
  throw UsageError("no replay procedure for environment '" + env + "'");
}

std::string metrics_text(const TrialOutcome& o) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [k, v] : o.metrics) {
    s << (first ? "" : " ") << k << '=' << v;
    first = false;
  }
  return s.str();
}

// ---- teach -----------------------------------------------------------------

struct TeachArgs {
  std::string env;
  std::string task;
  int cycles = 3;
  std::uint64_t seed = 1;
  std::string out;
  double trim = 5.0;
  std::string trace;
  std::string raw;
  std::string noise = "default";
};

int cmd_teach(const TeachArgs& a) {
  const auto task = parse_task(a.task);
  if (!a.env.empty() && a.env != task.environment()) {
    throw UsageError("task " + task.name() + " runs in environment '" +
                     std::string(task.environment()) + "', not '" + a.env + "'");
  }
  const auto taught = teach_task(task, a.cycles, a.trim, parse_noise(a.noise), a.seed);
  save_episode(taught.trimmed, a.out);
  if (!a.raw.empty()) save_episode(taught.raw, a.raw);
  if (!a.trace.empty()) save_trace(taught.trace, a.trace);
  std::cout << "task " << task.name() << " in " << task.environment() << ", " << a.cycles
            << " cycles\n"
            << "T before trim: " << taught.raw.length() << "\n"
            << "T after trim:  " << taught.trimmed.length() << "\n"
            << "wrote " << a.out << "\n";
  return 0;
}

// ---- replay ----------------------------------------------------------------

struct ReplayArgs {
  std::string episode;
  std::string env;
  std::string task;
  std::string policy = "mode";
  int trials = 10;
  std::size_t particles = 1000;
  double delta = 0.1;
  std::uint64_t seed = 1;
  std::string trace;
  std::string noise = "default";
  double trial_seconds = 40.0;
  std::size_t budget = 0;
};

int cmd_replay(const ReplayArgs& a) {
  const Episode ep = load_episode(a.episode);
  if (ep.length() < 2) throw std::runtime_error("episode needs at least 2 events");
  const bool labelled = !a.task.empty();
  TaskSpec task;
  if (labelled) {
    task = parse_task(a.task);
    if (!a.env.empty() && a.env != task.environment()) {
      throw UsageError("task " + task.name() + " runs in '" + std::string(task.environment()) +
                       "', not '" + a.env + "'");
    }
  } else {
    task = task_for_env(a.env.empty() ? "counting_wall" : a.env);
  }
  ReplayConfig rc;
  try {
    rc.policy = parse_policy(a.policy);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  rc.particles = a.particles;
  rc.filter.kernel.delta = a.delta;
  rc.seed = derive_seed(a.seed, {1});
  const auto sim_seed = derive_seed(a.seed, {2});
  const bool noise = parse_noise(a.noise);

  Trace trace;
  std::vector<TrialOutcome> outcomes;
  if (task.kind == TaskKind::counting) {
    const std::size_t budget = a.budget ? a.budget : ep.length();
    auto r = replay_counting(ep, task.count, a.trials, rc, noise, sim_seed, budget);
    trace = std::move(r.trace);
    outcomes = std::move(r.trials);
  } else {
    auto r = replay_choice(task, ep, a.trials, rc, noise, sim_seed, a.trial_seconds);
    trace = std::move(r.trace);
    outcomes = std::move(r.trials);
  }

  std::cout << "episode T=" << ep.length() << ", policy " << to_string(rc.policy) << ", N="
            << rc.particles << ", " << trace.size() << " steps\n";
  std::map<Label, int> tally;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    std::string label(to_string(o.label));
    // Without a task only timeouts and stalls are judged.
    if (!labelled && o.label != Label::dnf) label = "-";
    ++tally[o.label];
    std::cout << "trial " << i + 1 << ": " << label << "  " << metrics_text(o) << "\n";
  }
  if (labelled) {
    std::cout << "summary:";
    for (const auto& [l, n] : tally) std::cout << " " << to_string(l) << "=" << n;
    std::cout << "\n";
  }
  const auto stalls = stall_events(trace, ep);
  for (const auto& s : stalls) {
    std::cout << "stall: steps " << trace.steps[s.begin].step << "-" << trace.steps[s.end - 1].step
              << " (" << std::fixed << std::setprecision(1)
              << static_cast<double>(s.end - s.begin) * trace.dt << " s) commanded speed ~0\n"
              << std::defaultfloat;
  }
  std::cout << "stall events: " << stalls.size() << "\n";
  if (!a.trace.empty()) save_trace(trace, a.trace);
  return 0;
}

// ---- experiment --------------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::vector<std::string> set;
  std::string rows;
  std::string traces;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentConfig c;
  try {
    if (!a.config.empty()) c = load_experiment_config(a.config);
    for (const auto& kv : a.set) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!a.traces.empty()) c.keep_traces = true;
    c.validate();
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const auto report = run_experiment(c);
  std::cout << format_report(report);
  if (!a.rows.empty()) {
    std::ofstream out(a.rows);
    if (!out) throw std::runtime_error("cannot write '" + a.rows + "'");
    write_rows(report, out);
  }
  if (!a.traces.empty()) {
    std::ofstream out(a.traces);
    if (!out) throw std::runtime_error("cannot write '" + a.traces + "'");
    out << "variant\tpolicy\tset\tT\tstep\tmode_t\n";
    for (const auto& t : report.traces) {
      for (const auto& [step, mode] : t.points) {
        out << t.variant << '\t' << to_string(t.policy) << '\t' << t.set << '\t'
            << t.episode_length << '\t' << step << '\t' << mode << '\n';
      }
    }
  }
  return 0;
}

// ---- bench -------------------------------------------------------------------

int cmd_bench(const BenchConfig& c) {
  const auto report = run_bench(c);
  std::cout << format_bench(report);
  return 0;
}

// ---- inspect -----------------------------------------------------------------

int cmd_inspect(const std::string& episode_path, const std::string& trace_path) {
  if (episode_path.empty() == trace_path.empty()) {
    throw UsageError("inspect needs exactly one of --episode or --trace");
  }
  if (!episode_path.empty()) {
    const auto ep = load_episode(episode_path);
    std::cout << "events: " << ep.length() << "\n"
              << "cycle: " << ep.cycle_duration() << " s\n"
              << "duration: " << ep.length() * ep.cycle_duration() << " s\n";
    std::map<std::pair<double, double>, int> actions;
    std::array<std::int32_t, kChannels> lo{}, hi{};
    lo.fill(std::numeric_limits<std::int32_t>::max());
    for (std::size_t t = 1; t <= ep.length(); ++t) {
      const auto& a = ep.action(t);
      ++actions[{a.v_linear, a.v_angular}];
      for (std::size_t j = 0; j < kChannels; ++j) {
        lo[j] = std::min(lo[j], ep.observation(t).z[j]);
        hi[j] = std::max(hi[j], ep.observation(t).z[j]);
      }
    }
    std::cout << "actions:\n";
    for (const auto& [a, n] : actions) {
      std::cout << "  (" << a.first << ", " << a.second << ") x" << n << "\n";
    }
    if (!ep.empty()) {
      std::cout << "sensor ranges:\n";
      for (std::size_t j = 0; j < kChannels; ++j) {
        std::cout << "  " << kChannelNames[j] << " " << lo[j] << ".." << hi[j] << "\n";
      }
    }
  } else {
    const auto trace = load_trace(trace_path);
    std::cout << "steps: " << trace.size() << "\n"
              << "dt: " << trace.dt << " s\n";
    if (!trace.empty()) {
      int trials = 0;
      std::size_t mode_changes = 0;
      for (std::size_t i = 0; i < trace.size(); ++i) {
        trials = std::max(trials, trace.steps[i].trial);
        if (i > 0 && trace.steps[i].mode_t != trace.steps[i - 1].mode_t) ++mode_changes;
      }
      const auto& last = trace.steps.back().pose;
      std::cout << "trials: " << trials << "\n"
                << "mode changes: " << mode_changes << "\n"
                << "final pose: " << last.x << " " << last.y << " " << last.theta << "\n";
    }
  }
  return 0;
}

// ---- serve -------------------------------------------------------------------

std::atomic<bool> g_interrupted{false};

struct ServeArgs {
  int port = -1;
  std::string host = "127.0.0.1";
  std::string static_dir = "ui";
  int period_ms = 100;
  std::uint64_t seed = 1;
  std::string noise = "default";
  std::string env = "counting_wall";
};

int cmd_serve(const ServeArgs& a) {
  bridge::ServerConfig c;
  try {
    c.port = a.port >= 0 ? a.port : bridge::port_from_env(8765);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  c.host = a.host;
  c.static_dir = a.static_dir;
  c.period = std::chrono::milliseconds(a.period_ms);
  c.session.sim_seed = a.seed;
  c.session.noise = parse_noise(a.noise);
  c.session.default_env = a.env;
  bridge::Server server(c);
  server.start();
  std::cout << "listening on http://" << c.host << ":" << server.port() << std::endl;
  std::signal(SIGINT, [](int) { g_interrupted = true; });
  std::signal(SIGTERM, [](int) { g_interrupted = true; });
  while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle filter on episode: teach and replay robot behaviors"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  TeachArgs teach;
  auto* t = app.add_subcommand("teach", "Record a scripted teaching episode");
  t->add_option("--env", teach.env, "Environment (must match the task)");
  t->add_option("--task", teach.task, "counting:<n>, choice:<A|B|C>, wall_follow, rect_corridor")
      ->required();
  t->add_option("--cycles", teach.cycles, "Task repetitions performed by the trainer")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  t->add_option("--seed", teach.seed, "Random seed")->capture_default_str();
  t->add_option("--out", teach.out, "Episode file to write")->required();
  t->add_option("--trim", teach.trim, "Seconds dropped from each end")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  t->add_option("--trace", teach.trace, "Also write the teaching trace");
  t->add_option("--raw", teach.raw, "Also write the untrimmed episode");
  t->add_option("--noise", teach.noise, "default | none")->capture_default_str();

  ReplayArgs replay;
  auto* r = app.add_subcommand("replay", "Replay an episode closed-loop in the simulator");
  r->add_option("--episode", replay.episode, "Episode file")->required()->check(CLI::ExistingFile);
  r->add_option("--env", replay.env, "Environment (default counting_wall, or the task's)");
  r->add_option("--task", replay.task, "Task used to judge the trials");
  r->add_option("--policy", replay.policy, "mode | mean")
      ->check(CLI::IsMember({"mode", "mean"}))
      ->capture_default_str();
  r->add_option("--trials", replay.trials, "Number of trials")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  r->add_option("--particles", replay.particles, "Particle count N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  r->add_option("--delta", replay.delta, "Random replacement rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  r->add_option("--seed", replay.seed, "Random seed")->capture_default_str();
  r->add_option("--trace", replay.trace, "Trace file to write");
  r->add_option("--noise", replay.noise, "default | none")->capture_default_str();
  r->add_option("--trial-seconds", replay.trial_seconds, "Time limit of a choice trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  r->add_option("--budget", replay.budget, "Steps per counting trial (default T)");

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run a teach/replay experiment and tabulate outcomes");
  e->add_option("--config", exp.config, "key = value config file")->check(CLI::ExistingFile);
  e->add_option("--set", exp.set, "Override one key: --set trials=5");
  e->add_option("--rows", exp.rows, "Write one row per trial (TSV)");
  e->add_option("--traces", exp.traces, "Write mode-transition points (TSV)");

  BenchConfig bench;
  auto* b = app.add_subcommand("bench", "Time the four procedures of a replay step");
  b->add_option("--particles", bench.particles, "Particle count N")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--steps", bench.steps, "Replay steps per episode length")->capture_default_str();
  b->add_option("--rounds", bench.rounds, "Interleaved rounds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--cycles", bench.cycles, "Taught cycles per episode")->capture_default_str();
  b->add_option("--seed", bench.seed, "Random seed")->capture_default_str();

  std::string inspect_episode, inspect_trace;
  auto* i = app.add_subcommand("inspect", "Summarize an episode or trace file");
  i->add_option("--episode", inspect_episode, "Episode file")->check(CLI::ExistingFile);
  i->add_option("--trace", inspect_trace, "Trace file")->check(CLI::ExistingFile);

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the bridge for the teleoperation UI");
  s->add_option("--port", serve.port, "Port (default $PFOE_PORT or 8765; 0 picks one)")
      ->check(CLI::Range(0, 65535));
  s->add_option("--host", serve.host, "Bind address")->capture_default_str();
  s->add_option("--static", serve.static_dir, "UI files served at /")->capture_default_str();
  s->add_option("--period-ms", serve.period_ms, "Control cycle wall period")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  s->add_option("--seed", serve.seed, "Simulator seed")->capture_default_str();
  s->add_option("--noise", serve.noise, "default | none")->capture_default_str();
  s->add_option("--env", serve.env, "Default environment")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*t) return cmd_teach(teach);
    if (*r) return cmd_replay(replay);
    if (*e) return cmd_experiment(exp);
    if (*b) return cmd_bench(bench);
    if (*i) return cmd_inspect(inspect_episode, inspect_trace);
    if (*s) return cmd_serve(serve);
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsage;
}
