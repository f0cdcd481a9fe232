#include "pfoe/bench.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "pfoe/tasks/experiment.hpp"
#include "pfoe/tasks/replay.hpp"

namespace pfoe {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double per_step_ms(std::chrono::nanoseconds ns, std::size_t steps) {
  return steps ? std::chrono::duration<double, std::milli>(ns).count() / steps : 0.0;
}

}  // namespace

double BenchReport::length_spread() const {
  if (rows.size() < 2) return 0.0;
  const auto [lo, hi] = std::minmax_element(
      rows.begin(), rows.end(),
      [](const BenchRow& a, const BenchRow& b) { return a.episode_length < b.episode_length; });
  const double a = lo->ms.total();
  const double b = hi->ms.total();
  return a > 0.0 ? std::abs(b - a) / a : 0.0;
}

BenchReport run_bench(const BenchConfig& config) {
  if (config.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (config.particles < 1) throw std::invalid_argument("particles must be >= 1");
  BenchReport report;
  report.particles = config.particles;
  if (config.steps == 0) return report;

  struct Lane {
    tasks::TaughtEpisode taught;
    std::unique_ptr<sim::Simulator> sim;
    std::unique_ptr<tasks::Replayer> replayer;
    std::vector<double> motion, measurement, resampling, decision;
    std::size_t steps = 0;
  };
  std::vector<Lane> lanes(config.cycles.size());
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const tasks::TaskSpec task{tasks::TaskKind::counting, config.count, 'A'};
    auto& lane = lanes[i];
    lane.taught = tasks::teach_task(task, config.cycles[i], 5.0, true,
                                    tasks::derive_seed(config.seed, {std::uint64_t(i)}));
    lane.sim = std::make_unique<sim::Simulator>(sim::load_environment(task.environment()),
                                                tasks::sim_config(true),
                                                tasks::derive_seed(config.seed, {99, i}));
    tasks::ReplayConfig rc;
    rc.particles = config.particles;
    rc.seed = tasks::derive_seed(config.seed, {98, i});
    lane.replayer = std::make_unique<tasks::Replayer>(*lane.sim, lane.taught.trimmed, rc);
  }

  const std::size_t rounds = std::min<std::size_t>(config.rounds, config.steps);
  for (std::size_t r = 0; r < rounds; ++r) {
    const std::size_t n = config.steps * (r + 1) / rounds - config.steps * r / rounds;
    for (auto& lane : lanes) {
      tasks::StepTimings t;
      for (std::size_t k = 0; k < n; ++k) lane.replayer->step(&t);
      lane.motion.push_back(per_step_ms(t.motion, t.steps));
      lane.measurement.push_back(per_step_ms(t.measurement, t.steps));
      lane.resampling.push_back(per_step_ms(t.resampling, t.steps));
      lane.decision.push_back(per_step_ms(t.decision, t.steps));
      lane.steps += t.steps;
    }
  }

  for (std::size_t i = 0; i < lanes.size(); ++i) {
    auto& lane = lanes[i];
    BenchRow row;
    row.cycles = config.cycles[i];
    row.episode_length = lane.taught.trimmed.length();
    row.steps = lane.steps;
    row.ms = {median(lane.motion), median(lane.measurement), median(lane.resampling),
              median(lane.decision)};
    report.rows.push_back(row);
  }
  return report;
}

std::string format_bench(const BenchReport& report) {
  std::ostringstream out;
  out << "particles: " << report.particles << "\n";
  if (report.rows.empty()) {
    out << "no steps\n";
    return out.str();
  }
  out << std::setw(7) << "cycles" << std::setw(8) << "T" << std::setw(8) << "steps" << std::setw(11)
      << "motion" << std::setw(13) << "measurement" << std::setw(12) << "resampling"
      << std::setw(10) << "decision" << std::setw(10) << "total" << "   (ms/step)\n";
  out << std::fixed << std::setprecision(4);
  for (const auto& r : report.rows) {
    out << std::setw(7) << r.cycles << std::setw(8) << r.episode_length << std::setw(8) << r.steps
        << std::setw(11) << r.ms.motion << std::setw(13) << r.ms.measurement << std::setw(12)
        << r.ms.resampling << std::setw(10) << r.ms.decision << std::setw(10) << r.ms.total()
        << "\n";
  }
  out << std::setprecision(1) << "spread shortest vs longest: " << 100.0 * report.length_spread()
      << "%\n";
  return out.str();
}

}  // namespace pfoe
