#pragma once

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfoe/policy.hpp"
#include "pfoe/sim/simulator.hpp"
#include "pfoe/tasks/evaluate.hpp"
#include "pfoe/tasks/replay.hpp"
#include "pfoe/tasks/teacher.hpp"

namespace pfoe::tasks {

/// Experiment description, read from a flat `key = value` file.
///
///   task          counting | choice | wall_follow | rect_corridor
///   counts        comma list of n for counting (default 1,2,4,6,8)
///   pockets       comma list of A/B/C for choice (default A,B,C)
///   policies      comma list of mode/mean (default mode)
///   sets          teach-and-replay sets per variant and policy (default 5)
///   trials        replay trials per set (default 10)
///   teach_cycles  cycles driven by the trainer per set (default 3)
///   particles     N (default 1000)
///   delta         kernel random-replacement rate (default 0.1)
///   trim          seconds dropped from each end of the episode (default 5)
///   seed          master seed (default 1)
///   threads       worker threads (default 1)
///   noise         default | none
///   trial_seconds time limit for a choice/wall-follow trial (default 40)
///   keep_traces   true | false: keep mode-transition traces in the report
struct ExperimentConfig {
  TaskKind task = TaskKind::counting;
  std::vector<int> counts{1, 2, 4, 6, 8};
  std::vector<char> pockets{'A', 'B', 'C'};
  std::vector<Policy> policies{Policy::mode};
  int sets = 5;
  int trials = 10;
  int teach_cycles = 3;
  std::size_t particles = 1000;
  double delta = 0.1;
  double trim_seconds = 5.0;
  std::uint64_t seed = 1;
  int threads = 1;
  bool noise = true;
  double trial_seconds = 40.0;
  bool keep_traces = false;

  void validate() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ExperimentConfig parse_experiment_config(std::string_view text);
ExperimentConfig load_experiment_config(const std::string& path);
/// Applies one `key=value` override.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

struct ReportRow {
  std::string variant;  // task name, e.g. "counting:4" or "choice:B"
  Policy policy = Policy::mode;
  int set = 0;
  int trial = 0;
  TrialOutcome outcome;
};

/// (replay step, mode index) pairs of one set's replay.
struct ModeTrace {
  std::string variant;
  Policy policy = Policy::mode;
  int set = 0;
  std::size_t episode_length = 0;
  std::vector<std::pair<std::size_t, std::size_t>> points;
};

struct SetSummary {
  std::string variant;
  Policy policy = Policy::mode;
  int set = 0;
  std::size_t raw_length = 0;
  std::size_t episode_length = 0;
  int stall_events = 0;
};

struct Report {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<SetSummary> sets;
  std::vector<ModeTrace> traces;

  int count(std::string_view variant, Policy policy, Label label) const;
  int count(Policy policy, Label label) const;
  int trials(std::string_view variant, Policy policy) const;
};

/// For each variant, policy and set: teach with the scripted trainer, trim,
/// then replay the trials. Results are independent of `threads`.
Report run_experiment(const ExperimentConfig& config);

/// Table shaped like the paper-style summaries (per-set successes for
/// counting, success/DNF/mischoice per pocket and policy for choice).
std::string format_report(const Report& report);
/// One tab-separated row per trial: variant policy set trial outcome metrics.
void write_rows(const Report& report, std::ostream& out);

/// Deterministic stream derivation (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

sim::SimConfig sim_config(bool noise);

// Building blocks shared with the CLI.

struct TaughtEpisode {
  Episode raw;
  Episode trimmed;
  Trace trace;
};

TaughtEpisode teach_task(const TaskSpec& task, int cycles, double trim_seconds, bool noise,
                         std::uint64_t seed);

struct CountingReplay {
  Trace trace;
  std::vector<TrialOutcome> trials;  // one per cycle, failures for cycles never completed
};

/// Continuous replay of `trials` counting cycles; each wall visit is a trial.
CountingReplay replay_counting(const Episode& episode, int n, int trials, const ReplayConfig& rc,
                               bool noise, std::uint64_t sim_seed,
                               std::size_t steps_per_trial);

struct ChoiceReplay {
  Trace trace;
  std::vector<TrialOutcome> trials;
};

/// Trials from the start pose; the robot is put back at the start after each
/// trial while the filter keeps running.
ChoiceReplay replay_choice(const TaskSpec& task, const Episode& episode, int trials,
                           const ReplayConfig& rc, bool noise, std::uint64_t sim_seed,
                           double trial_seconds);

}  // namespace pfoe::tasks
