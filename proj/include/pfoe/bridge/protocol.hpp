#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pfoe/filter.hpp"
#include "pfoe/policy.hpp"
#include "pfoe/sim/world.hpp"
#include "pfoe/tasks/teacher.hpp"

namespace pfoe::bridge {

// Client -> server messages. Every message is a JSON object with a "type".
//   {"type":"hello"}
//   {"type":"start_teach","env":"counting_wall"}
//   {"type":"keys","keys":{"up":true,"left":false,"right":false,"down":false}}
//   {"type":"reset_pose"}
//   {"type":"save_episode","trim":5,"path":"ep.txt"}      trim, path optional
//   {"type":"load_episode","path":"ep.txt","env":"counting_wall"}
//   {"type":"start_replay","policy":"mode","particles":1000,"delta":0.1,"seed":1}
//   {"type":"stop"}
//   {"type":"close"}

struct Hello {};
struct StartTeach { std::string env; };
struct Keys { tasks::KeyState keys; };
struct ResetPose {};
struct SaveEpisode {
  double trim = 5.0;
  std::optional<std::string> path;
};
struct LoadEpisode {
  std::string path;
  std::optional<std::string> env;
};
struct StartReplay {
  Policy policy = Policy::mode;
  std::size_t particles = 1000;
  double delta = 0.1;
  std::uint64_t seed = 1;
};
struct Stop {};
struct Close {};

using Message = std::variant<Hello, StartTeach, Keys, ResetPose, SaveEpisode, LoadEpisode,
                             StartReplay, Stop, Close>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ProtocolError on anything that is not a well-formed message.
Message parse_message(std::string_view text);

enum class Phase { idle, teach, replay };
std::string_view to_string(Phase phase);

/// Per-cycle snapshot sent to clients.
struct StateFrame {
  Phase phase = Phase::idle;
  std::size_t step = 0;
  sim::Pose pose;
  Observation z;
  std::size_t mode_t = 0;
  double mode_mass = 0.0;
  std::vector<double> belief_bins;  // empty while teaching
  tasks::KeyState keys;
  Action action;
};

nlohmann::json to_json(const StateFrame& frame);
nlohmann::json error_frame(std::string_view code, std::string_view message);

inline constexpr std::size_t kMaxBeliefBins = 200;

/// Particle weight binned over 1..T into min(T, max_bins) equal-width bins.
/// Index t falls in bin (t-1)*B/T.
std::vector<double> belief_histogram(const ParticleSet& ps, std::size_t max_bins = kMaxBeliefBins);

}  // namespace pfoe::bridge
