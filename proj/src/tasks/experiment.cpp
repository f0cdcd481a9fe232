#include "pfoe/tasks/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace pfoe::tasks {

namespace {

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim_ws(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Job {
  TaskSpec task;
  std::uint64_t variant_key = 0;
  Policy policy = Policy::mode;
  int set = 0;
};

struct JobResult {
  std::vector<ReportRow> rows;
  SetSummary summary;
  std::optional<ModeTrace> trace;
};

ModeTrace mode_points(const Trace& trace) {
  ModeTrace out;
  std::size_t last = 0;
  for (const auto& s : trace.steps) {
    if (s.mode_t != last) {
      out.points.emplace_back(s.step, s.mode_t);
      last = s.mode_t;
    }
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (sets < 0 || trials < 0) throw ConfigError("sets and trials must be >= 0");
  if (teach_cycles < 1) throw ConfigError("teach_cycles must be >= 1");
  if (particles < 1) throw ConfigError("particles must be >= 1");
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must be in [0, 1]");
  if (!(trim_seconds >= 0.0)) throw ConfigError("trim must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (!(trial_seconds > 0.0)) throw ConfigError("trial_seconds must be > 0");
  if (policies.empty()) throw ConfigError("policies must not be empty");
  if (task == TaskKind::counting) {
    if (counts.empty()) throw ConfigError("counts must not be empty");
    for (int n : counts) {
      if (n < 1) throw ConfigError("counts must be >= 1");
    }
  }
  if (task == TaskKind::choice && pockets.empty()) throw ConfigError("pockets must not be empty");
}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value) {
  key = trim_ws(key);
  value = trim_ws(value);
  if (key == "task") {
    if (value == "counting") c.task = TaskKind::counting;
    else if (value == "choice") c.task = TaskKind::choice;
    else if (value == "wall_follow") c.task = TaskKind::wall_follow;
    else if (value == "rect_corridor") c.task = TaskKind::rect_corridor;
    else throw ConfigError("task: unknown task '" + std::string(value) + "'");
  } else if (key == "counts") {
    c.counts.clear();
    for (auto item : split_list(value)) c.counts.push_back(parse_number<int>(key, item));
  } else if (key == "pockets") {
    c.pockets.clear();
    for (auto item : split_list(value)) {
      if (item != "A" && item != "B" && item != "C") {
        throw ConfigError("pockets: expected A, B or C, got '" + std::string(item) + "'");
      }
      c.pockets.push_back(item[0]);
    }
  } else if (key == "policies") {
    c.policies.clear();
    for (auto item : split_list(value)) {
      try {
        c.policies.push_back(parse_policy(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("policies: ") + e.what());
      }
    }
  } else if (key == "sets") {
    c.sets = parse_number<int>(key, value);
  } else if (key == "trials") {
    c.trials = parse_number<int>(key, value);
  } else if (key == "teach_cycles") {
    c.teach_cycles = parse_number<int>(key, value);
  } else if (key == "particles") {
    c.particles = parse_number<std::size_t>(key, value);
  } else if (key == "delta") {
    c.delta = parse_number<double>(key, value);
  } else if (key == "trim") {
    c.trim_seconds = parse_number<double>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, value);
  } else if (key == "noise") {
    if (value == "default") c.noise = true;
    else if (value == "none") c.noise = false;
    else throw ConfigError("noise: expected default or none");
  } else if (key == "trial_seconds") {
    c.trial_seconds = parse_number<double>(key, value);
  } else if (key == "keep_traces") {
    c.keep_traces = parse_bool(key, value);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

sim::SimConfig sim_config(bool noise) {
  sim::SimConfig c;
  if (!noise) {
    c.noise = sim::MotionNoise::none();
    c.sensor.log_sigma = 0.0;
  }
  return c;
}

TaughtEpisode teach_task(const TaskSpec& task, int cycles, double trim_seconds, bool noise,
                         std::uint64_t seed) {
  sim::Simulator sim(sim::load_environment(task.environment()), sim_config(noise),
                     derive_seed(seed, {1}));
  auto teacher = scripted_teacher(task, cycles, derive_seed(seed, {2}));
  auto taught = teach(sim, *teacher);
  TaughtEpisode out;
  out.trimmed = trim(taught.episode, trim_seconds, trim_seconds);
  out.raw = std::move(taught.episode);
  out.trace = std::move(taught.trace);
  return out;
}

CountingReplay replay_counting(const Episode& episode, int n, int trials, const ReplayConfig& rc,
                               bool noise, std::uint64_t sim_seed,
                               std::size_t steps_per_trial) {
  sim::Simulator sim(sim::load_environment("counting_wall"), sim_config(noise), sim_seed);
  Replayer replayer(sim, episode, rc);
  CountingReplay out;
  out.trace.dt = sim.config().dt;
  const std::size_t budget = steps_per_trial * static_cast<std::size_t>(std::max(trials, 0));
  const CountingParams params;
  // Stop once the requested number of wall visits have completed.
  int complete = 0;
  bool inside = false;
  for (std::size_t i = 0; i < budget && complete < trials; ++i) {
    replayer.set_trial(complete + 1);
    out.trace.steps.push_back(replayer.step());
    const double d = sim.world().clearance(sim.pose().position());
    if (!inside && d <= params.near) inside = true;
    if (inside && d >= params.far) {
      inside = false;
      ++complete;
    }
  }
  const auto visits = wall_visits(out.trace, sim.world(), params);
  for (const auto& v : visits) {
    if (!v.complete || static_cast<int>(out.trials.size()) >= trials) continue;
    TrialOutcome t;
    t.label = v.count == n ? Label::success : Label::failure;
    t.metrics["count"] = v.count;
    t.metrics["seconds"] = static_cast<double>(v.end - v.begin + 1) * out.trace.dt;
    out.trials.push_back(std::move(t));
  }
  while (static_cast<int>(out.trials.size()) < trials) {
    TrialOutcome t;
    t.label = Label::failure;
    t.metrics["missing"] = 1.0;
    out.trials.push_back(std::move(t));
  }
  return out;
}

ChoiceReplay replay_choice(const TaskSpec& task, const Episode& episode, int trials,
                           const ReplayConfig& rc, bool noise, std::uint64_t sim_seed,
                           double trial_seconds) {
  sim::Simulator sim(sim::load_environment(task.environment()), sim_config(noise), sim_seed);
  Replayer replayer(sim, episode, rc);
  ChoiceReplay out;
  out.trace.dt = sim.config().dt;
  const auto limit = static_cast<std::size_t>(std::llround(trial_seconds / out.trace.dt));
  const std::string target = task.kind == TaskKind::choice ? std::string(1, task.pocket) : "goal";
  ChoiceParams params;
  if (task.kind != TaskKind::choice) params.pockets = {"goal"};
  for (int trial = 1; trial <= trials; ++trial) {
    replayer.set_trial(trial);
    if (trial > 1) replayer.replace(sim.world().start);
    ChoiceJudge judge(target, sim.world(), out.trace.dt, params);
    std::optional<TrialOutcome> outcome;
    for (std::size_t i = 0; i < limit && !outcome; ++i) {
      out.trace.steps.push_back(replayer.step());
      outcome = judge.feed(out.trace.steps.back());
    }
    TrialOutcome o = outcome ? *outcome : judge.finish();
    if (task.kind != TaskKind::choice) {
      if (o.label != Label::success) o.label = Label::failure;
      o.metrics.erase("pocket");
    }
    out.trials.push_back(std::move(o));
  }
  return out;
}

int Report::count(std::string_view variant, Policy policy, Label label) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
    return r.variant == variant && r.policy == policy && r.outcome.label == label;
  }));
}

int Report::count(Policy policy, Label label) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
    return r.policy == policy && r.outcome.label == label;
  }));
}

int Report::trials(std::string_view variant, Policy policy) const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) {
    return r.variant == variant && r.policy == policy;
  }));
}

Report run_experiment(const ExperimentConfig& config) {
  config.validate();
  Report report;
  report.config = config;

  std::vector<TaskSpec> variants;
  switch (config.task) {
    case TaskKind::counting:
      for (int n : config.counts) variants.push_back({TaskKind::counting, n, 'A'});
      break;
    case TaskKind::choice:
      for (char p : config.pockets) variants.push_back({TaskKind::choice, 1, p});
      break;
    default:
      variants.push_back({config.task, 1, 'A'});
  }

  std::vector<Job> jobs;
  for (const auto& v : variants) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(v.kind) << 32) |
        static_cast<std::uint64_t>(v.kind == TaskKind::choice ? v.pocket : v.count);
    for (Policy p : config.policies) {
      for (int s = 1; s <= config.sets; ++s) jobs.push_back({v, key, p, s});
    }
  }
  if (config.trials == 0) jobs.clear();

  std::vector<JobResult> results(jobs.size());
  auto run_job = [&](std::size_t i) {
    const Job& job = jobs[i];
    // Teaching depends on variant and set only, so both policies replay the
    // same episode.
    const auto teach_seed = derive_seed(config.seed, {job.variant_key, std::uint64_t(job.set), 0});
    const auto taught = teach_task(job.task, config.teach_cycles, config.trim_seconds,
                                   config.noise, teach_seed);
    ReplayConfig rc;
    rc.policy = job.policy;
    rc.particles = config.particles;
    rc.filter.kernel.delta = config.delta;
    const auto replay_seed = derive_seed(
        config.seed, {job.variant_key, std::uint64_t(job.set), 1 + std::uint64_t(job.policy)});
    rc.seed = derive_seed(replay_seed, {1});
    const auto sim_seed = derive_seed(replay_seed, {2});

    Trace trace;
    std::vector<TrialOutcome> outcomes;
    if (job.task.kind == TaskKind::counting) {
      // Twice the average taught cycle is plenty for a working replay.
      const std::size_t per_cycle =
          2 * std::max<std::size_t>(taught.trimmed.length() / config.teach_cycles, 1);
      auto r = replay_counting(taught.trimmed, job.task.count, config.trials, rc, config.noise,
                               sim_seed, per_cycle);
      trace = std::move(r.trace);
      outcomes = std::move(r.trials);
    } else {
      auto r = replay_choice(job.task, taught.trimmed, config.trials, rc, config.noise, sim_seed,
                             config.trial_seconds);
      trace = std::move(r.trace);
      outcomes = std::move(r.trials);
    }

    JobResult& out = results[i];
    for (int t = 0; t < static_cast<int>(outcomes.size()); ++t) {
      out.rows.push_back({job.task.name(), job.policy, job.set, t + 1, std::move(outcomes[t])});
    }
    out.summary = {job.task.name(),         job.policy, job.set, taught.raw.length(),
                   taught.trimmed.length(), count_stalls(trace, taught.trimmed)};
    if (config.keep_traces) {
      out.trace = mode_points(trace);
      out.trace->variant = job.task.name();
      out.trace->policy = job.policy;
      out.trace->set = job.set;
      out.trace->episode_length = taught.trimmed.length();
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), jobs.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            run_job(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  for (auto& r : results) {
    for (auto& row : r.rows) report.rows.push_back(std::move(row));
    report.sets.push_back(std::move(r.summary));
    if (r.trace) report.traces.push_back(std::move(*r.trace));
  }
  return report;
}

std::string format_report(const Report& report) {
  std::ostringstream out;
  const auto& c = report.config;
  if (report.rows.empty()) {
    out << "no trials\n";
    return out.str();
  }
  if (c.task == TaskKind::counting) {
    for (Policy p : c.policies) {
      out << "counting, policy " << to_string(p) << ": successes per set (of " << c.trials << ")\n";
      out << std::setw(4) << "n";
      for (int s = 1; s <= c.sets; ++s) out << std::setw(6) << ("#" + std::to_string(s));
      out << std::setw(9) << "total" << "\n";
      for (int n : c.counts) {
        const auto variant = TaskSpec{TaskKind::counting, n, 'A'}.name();
        out << std::setw(4) << n;
        int total = 0;
        for (int s = 1; s <= c.sets; ++s) {
          int ok = 0;
          for (const auto& r : report.rows) {
            if (r.variant == variant && r.policy == p && r.set == s &&
                r.outcome.label == Label::success) {
              ++ok;
            }
          }
          total += ok;
          out << std::setw(6) << ok;
        }
        out << std::setw(5) << total << "/" << std::left << std::setw(3) << c.sets * c.trials
            << std::right << "\n";
      }
    }
  } else {
    out << std::left << std::setw(16) << "variant" << std::setw(8) << "policy" << std::right
        << std::setw(9) << "success" << std::setw(11) << "mischoice" << std::setw(6) << "DNF"
        << std::setw(9) << "failure" << std::setw(8) << "trials" << "\n";
    std::vector<std::string> variants;
    for (const auto& r : report.rows) {
      if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) {
        variants.push_back(r.variant);
      }
    }
    for (const auto& v : variants) {
      for (Policy p : c.policies) {
        out << std::left << std::setw(16) << v << std::setw(8) << to_string(p) << std::right
            << std::setw(9) << report.count(v, p, Label::success) << std::setw(11)
            << report.count(v, p, Label::mischoice) << std::setw(6) << report.count(v, p, Label::dnf)
            << std::setw(9) << report.count(v, p, Label::failure) << std::setw(8)
            << report.trials(v, p) << "\n";
      }
    }
  }
  int stalls_total = 0;
  for (const auto& s : report.sets) stalls_total += s.stall_events;
  out << "stall events: " << stalls_total << " over " << report.sets.size() << " sets\n";
  return out.str();
}

void write_rows(const Report& report, std::ostream& out) {
  out << "variant\tpolicy\tset\ttrial\toutcome\tmetrics\n";
  for (const auto& r : report.rows) {
    out << r.variant << '\t' << to_string(r.policy) << '\t' << r.set << '\t' << r.trial << '\t'
        << to_string(r.outcome.label) << '\t';
    bool first = true;
    for (const auto& [k, v] : r.outcome.metrics) {
      out << (first ? "" : ",") << k << '=' << v;
      first = false;
    }
    out << '\n';
  }
}

}  // namespace pfoe::tasks
