#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pfoe {

struct BenchConfig {
  std::vector<int> cycles{3, 10, 20};  // taught counting cycles per episode
  int count = 4;                       // n of the counting task used for teaching
  std::size_t particles = 1000;
  std::size_t steps = 1000;            // replay steps per episode length
  int rounds = 5;                      // steps are split into interleaved rounds
  std::uint64_t seed = 1;
};

/// Mean milliseconds per control step, per procedure.
struct ProcedureTimes {
  double motion = 0.0;
  double measurement = 0.0;
  double resampling = 0.0;
  double decision = 0.0;

  double total() const { return motion + measurement + resampling + decision; }
};

struct BenchRow {
  int cycles = 0;
  std::size_t episode_length = 0;
  std::size_t steps = 0;
  ProcedureTimes ms;
};

struct BenchReport {
  std::size_t particles = 0;
  std::vector<BenchRow> rows;

  /// Relative difference of total step time between the shortest and the
  /// longest episode; 0 with fewer than two rows.
  double length_spread() const;
};

/// Replays counting episodes of each length with the mode policy and times
/// each procedure. Lengths are measured in interleaved rounds and each
/// procedure reports the median of its round means, which damps drift in
/// machine load.
BenchReport run_bench(const BenchConfig& config);
std::string format_bench(const BenchReport& report);

}  // namespace pfoe
