#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pfoe/bridge/protocol.hpp"
#include "pfoe/episode.hpp"
#include "pfoe/sim/simulator.hpp"
#include "pfoe/tasks/replay.hpp"

namespace pfoe::bridge {

struct SessionConfig {
  std::string default_env = "counting_wall";
  bool noise = true;
  std::uint64_t sim_seed = 1;
};

/// The state owned by the control loop: simulator, recording and filter.
/// Single-threaded; the server feeds it messages and calls tick() once per
/// control cycle.
class Session {
 public:
  explicit Session(SessionConfig config = {});
  ~Session();

  /// Applies a raw client message and returns the frames it produces right
  /// away (acknowledgements, errors). A malformed or out-of-place message
  /// yields an error frame and closes the session.
  std::vector<nlohmann::json> receive(std::string_view text);
  std::vector<nlohmann::json> handle(const Message& message);

  /// One control cycle. Returns the state frame, or nothing while idle.
  std::optional<StateFrame> tick();

  Phase phase() const { return phase_; }
  bool closed() const { return closed_; }
  /// Reopens after close; the saved episode survives.
  void reopen() { closed_ = false; }
  const std::optional<Episode>& episode() const { return episode_; }
  const Episode& recording() const { return recording_; }
  const tasks::Replayer* replayer() const { return replayer_.get(); }
  const sim::Simulator* simulator() const { return sim_.get(); }

 private:
  std::vector<nlohmann::json> fail(std::string_view code, std::string_view message);
  void start_world(const std::string& env);

  SessionConfig config_;
  Phase phase_ = Phase::idle;
  bool closed_ = false;
  std::string env_;
  std::unique_ptr<sim::Simulator> sim_;
  tasks::KeyState keys_;
  bool pending_replace_ = false;
  Episode recording_;
  std::optional<Episode> episode_;
  std::unique_ptr<tasks::Replayer> replayer_;
  std::size_t step_ = 0;
};

}  // namespace pfoe::bridge
