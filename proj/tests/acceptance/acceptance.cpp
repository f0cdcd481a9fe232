// Acceptance run: one PASS/FAIL line per criterion.
//
// Exit status is 0 once every criterion has been evaluated and reported;
// pass --strict to exit 1 when any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "fixtures.hpp"
#include "pfoe/bench.hpp"
#include "pfoe/oracle.hpp"
#include "pfoe/tasks/experiment.hpp"

using namespace pfoe;
using namespace pfoe::tasks;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- oracle ---------------------------------------------------------------

std::vector<std::vector<double>> kernel_matrix(std::size_t T, const KernelParams& k) {
  std::vector<std::vector<double>> m(T, std::vector<double>(T, k.delta / static_cast<double>(T)));
  for (std::size_t s = 1; s <= T; ++s) {
    for (std::size_t i = 0; i < k.offsets.size(); ++i) {
      const long d = static_cast<long>(s) + 1 + k.offsets[i];
      const double mass = (1.0 - k.delta) * k.probs[i];
      if (d >= 1 && d <= static_cast<long>(T)) {
        m[s - 1][d - 1] += mass;
      } else {
        for (auto& x : m[s - 1]) x += mass / static_cast<double>(T);
      }
    }
  }
  return m;
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  const KernelParams k;

  double worst = 0.0;
  Rng rng(99);
  for (std::size_t T = 1; T <= 30; ++T) {
    const auto m = kernel_matrix(T, k);
    ExactBelief b;
    b.probs.resize(T);
    for (auto& p : b.probs) p = uniform01(rng);
    const double s = std::accumulate(b.probs.begin(), b.probs.end(), 0.0);
    for (auto& p : b.probs) p /= s;
    const auto got = exact_predict(b, k);
    for (std::size_t t = 0; t < T; ++t) {
      double want = 0.0;
      for (std::size_t u = 0; u < T; ++u) want += b.probs[u] * m[u][t];
      worst = std::max(worst, std::abs(got.probs[t] - want));
    }
  }

  const std::size_t T = 100;
  const auto ep = fixtures::synthetic_episode(T);
  auto mean_tv = [&](std::size_t n) {
    double sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng r(seed);
      auto ps = init_particles(T, n, r);
      auto exact = uniform_belief(T);
      for (std::size_t s = 0; s < 20; ++s) {
        const auto& z = ep.observation(20 + s);
        motion_update(ps, k, r);
        measurement_update(ps, z, ep);
        resample(ps, r);
        exact = exact_correct(exact_predict(exact, k), z, ep);
      }
      sum += tv_distance(exact, ps);
    }
    return sum / 10.0;
  };
  const double tv5 = mean_tv(100000);
  const double tv4 = mean_tv(10000);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst <= 1e-12 && tv5 <= 0.05 && tv4 <= 0.15 && secs < 30.0;
  v.detail = "TV(N=1e5)=" + fmt("%.4f", tv5) + " TV(N=1e4)=" + fmt("%.4f", tv4) +
             " matrix err=" + fmt("%.1e", worst) + " time=" + fmt("%.1fs", secs);
  return v;
}

// ---- kernel ---------------------------------------------------------------

Verdict kernel_marginal() {
  const auto t0 = Clock::now();
  const KernelParams k;
  const std::size_t T = 100;
  const long draws = 1000000;
  // Start indices cycle through 1..T, so the expected destination law is the
  // average of the per-index marginals.
  std::vector<double> expected(T, 0.0);
  const auto m = kernel_matrix(T, k);
  for (std::size_t s = 0; s < T; ++s) {
    for (std::size_t t = 0; t < T; ++t) expected[t] += m[s][t] / static_cast<double>(T);
  }
  std::vector<long> counts(T, 0);
  Rng rng(2024);
  for (long i = 0; i < draws; ++i) {
    const auto start = static_cast<std::uint32_t>(i % static_cast<long>(T)) + 1;
    ++counts[sample_destination(start, T, k, rng) - 1];
  }
  double stat = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double e = expected[t] * static_cast<double>(draws);
    stat += (counts[t] - e) * (counts[t] - e) / e;
  }
  const double p = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared(static_cast<double>(T - 1)), stat));
  const double secs = seconds_since(t0);
  return {p > 0.01 && secs < 10.0,
          "chi2=" + fmt("%.1f", stat) + " p=" + fmt("%.3f", p) + " time=" + fmt("%.2fs", secs)};
}

// ---- likelihood -----------------------------------------------------------

Verdict likelihood_suite() {
  Rng rng(5);
  bool ok = true;
  for (int i = 0; i < 10000 && ok; ++i) {
    Observation a, b;
    for (std::size_t j = 0; j < kChannels; ++j) {
      a.z[j] = static_cast<std::int32_t>(uniform_index(rng, 4095));
      b.z[j] = static_cast<std::int32_t>(uniform_index(rng, 4095));
    }
    const double l = likelihood(a, b);
    ok = likelihood(a, a) == 1.0 && l == likelihood(b, a) && l > 0.0 && l <= 1.0;
  }
  const Observation base{{10, 33, 7, 250}};
  Observation tenfold = base;
  tenfold.z[0] = 100;
  const double worked = likelihood(tenfold, base);
  ok = ok && worked == 0.5;
  return {ok, "equality, symmetry, range over 10000 pairs; 10x single channel = " +
                  fmt("%.17g", worked)};
}

// ---- resampling -----------------------------------------------------------

Verdict resampling() {
  Rng rng(77);
  int bad_counts = 0;
  int bad_weights = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 1000);
    ParticleSet ps;
    ps.episode_length = n;
    double total = 0.0;
    for (std::uint32_t i = 1; i <= n; ++i) {
      double w = uniform01(rng);
      if (trial % 3 == 1) w = w * w * w * w;                // skewed
      if (trial % 3 == 2 && uniform01(rng) < 0.5) w = 0.0;  // sparse
      ps.particles.push_back({i, w});
      total += w;
    }
    if (total == 0.0) ps.particles[0].w = total = 1.0;
    std::vector<double> expect;
    for (const auto& p : ps.particles) expect.push_back(static_cast<double>(n) * p.w / total);
    resample(ps, rng);
    std::vector<std::size_t> copies(n + 1, 0);
    for (const auto& p : ps.particles) {
      ++copies[p.t];
      if (p.w != 1.0 / static_cast<double>(n)) ++bad_weights;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      const auto c = static_cast<double>(copies[i]);
      if (c < std::floor(expect[i - 1] - 1e-9) || c > std::ceil(expect[i - 1] + 1e-9)) ++bad_counts;
    }
  }
  return {bad_counts == 0 && bad_weights == 0,
          "1000 weight vectors, copy-count violations=" + std::to_string(bad_counts) +
              " weight violations=" + std::to_string(bad_weights)};
}

// ---- counting trend -------------------------------------------------------

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

Verdict counting_trend() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.task = TaskKind::counting;
  c.counts = {1, 2, 4, 6, 8};
  c.policies = {Policy::mode};
  c.sets = 5;
  c.trials = 10;
  const auto report = run_experiment(c);

  std::map<int, double> rate;
  std::map<std::pair<int, int>, int> per_set;
  for (int n : c.counts) {
    const auto variant = "counting:" + std::to_string(n);
    rate[n] = static_cast<double>(report.count(variant, Policy::mode, Label::success)) /
              static_cast<double>(report.trials(variant, Policy::mode));
  }
  for (const auto& row : report.rows) {
    const int n = std::stoi(row.variant.substr(row.variant.find(':') + 1));
    per_set[{n, row.set}] += row.outcome.label == Label::success;
  }
  std::vector<double> xs, ys;
  for (const auto& [key, ok] : per_set) {
    if (key.first < 2) continue;
    xs.push_back(key.first);
    ys.push_back(ok);
  }
  const double rho = spearman(xs, ys);
  bool non_increasing = true;
  const std::vector<int> tail{2, 4, 6, 8};
  for (std::size_t i = 1; i < tail.size(); ++i) {
    non_increasing = non_increasing && rate[tail[i]] <= rate[tail[i - 1]] + 0.05;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = rate[1] >= 0.9 && rate[2] >= 0.9 && rate[6] >= 0.5 && non_increasing && rho < 0.0 &&
           secs < 300.0;
  std::ostringstream os;
  for (int n : c.counts) os << "n=" << n << ":" << std::lround(rate[n] * 100) << "% ";
  os << "spearman=" << fmt("%.2f", rho) << " time=" << fmt("%.0fs", secs);
  v.detail = os.str();
  return v;
}

// ---- mean-policy stall ----------------------------------------------------

Verdict mean_stall() {
  int with_stall = 0;
  int events = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto taught = teach_task({TaskKind::counting, 2, 'A'}, 3, 5.0, true, derive_seed(s, {1}));
    ReplayConfig rc;
    rc.policy = Policy::mean;
    rc.seed = derive_seed(s, {2});
    const auto per_cycle = 2 * taught.trimmed.length() / 3;
    const auto r = replay_counting(taught.trimmed, 2, 10, rc, true, derive_seed(s, {3}), per_cycle);
    const int k = count_stalls(r.trace, taught.trimmed);
    events += k;
    with_stall += k > 0;
  }
  return {with_stall >= 3, "runs with a stall " + std::to_string(with_stall) + "/10, events " +
                               std::to_string(events)};
}

// ---- choice gap -----------------------------------------------------------

Verdict choice_gap() {
  ExperimentConfig c;
  c.task = TaskKind::choice;
  c.pockets = {'A', 'B', 'C'};
  c.policies = {Policy::mode, Policy::mean};
  c.sets = 3;
  c.trials = 10;
  const auto report = run_experiment(c);
  const int mode = report.count(Policy::mode, Label::dnf);
  const int mean = report.count(Policy::mean, Label::dnf);
  const int total = 3 * 10 * 3;
  return {mean < mode, "DNF mode " + std::to_string(mode) + "/" + std::to_string(total) +
                           ", mean " + std::to_string(mean) + "/" + std::to_string(total)};
}

// ---- performance ----------------------------------------------------------

Verdict performance() {
  BenchConfig bc;
  bc.cycles = {3, 20};
  const auto report = run_bench(bc);
  double worst = 0.0;
  bool heaviest = true;
  for (const auto& row : report.rows) {
    const auto& t = row.ms;
    worst = std::max(worst, t.total());
    heaviest = heaviest && t.measurement > t.motion && t.measurement > t.resampling &&
               t.measurement > t.decision;
  }
  const double spread = report.length_spread();
  std::ostringstream os;
  os << "max total=" << fmt("%.4f", worst) << " ms/step, 3 vs 20 cycles spread="
     << fmt("%.1f%%", spread * 100.0) << ", measurement heaviest=" << (heaviest ? "yes" : "no");
  return {worst <= 8.0 && spread < 0.2 && heaviest, os.str()};
}

// ---- determinism ----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path dir = PFOE_TEST_TMP;
  fs::create_directories(dir);
  const std::string cli = PFOE_CLI;
  const auto ep = (dir / "ep.txt").string();
  auto run = [&](const std::string& args) {
    return std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
  };
  if (run("teach --task counting:4 --seed 3 --out " + ep) != 0) return {false, "teach failed"};
  const std::string replay = "replay --episode " + ep + " --policy mean --trials 3 --seed 11";
  const auto a = (dir / "a.txt").string();
  const auto b = (dir / "b.txt").string();
  if (run(replay + " --trace " + a) != 0 || run(replay + " --trace " + b) != 0) {
    return {false, "replay failed"};
  }
  const auto ta = slurp(a);
  const auto tb = slurp(b);
  return {!ta.empty() && ta == tb, std::to_string(ta.size()) + " bytes, identical=" +
                                       (ta == tb ? std::string("yes") : std::string("no"))};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle-equivalence", oracle_equivalence},
      {"kernel-marginal", kernel_marginal},
      {"likelihood", likelihood_suite},
      {"resampling", resampling},
      {"counting-trend", counting_trend},
      {"mean-policy-stall", mean_stall},
      {"choice-policy-gap", choice_gap},
      {"performance", performance},
      {"replay-determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return strict && failed > 0 ? 1 : 0;
}
