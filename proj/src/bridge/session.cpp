#include "pfoe/bridge/session.hpp"

#include "pfoe/tasks/experiment.hpp"

namespace pfoe::bridge {

using nlohmann::json;

namespace {

json ack(std::string_view of) { return {{"type", "ack"}, {"of", of}}; }

template <class... F>
struct Overload : F... {
  using F::operator()...;
};
template <class... F>
Overload(F...) -> Overload<F...>;

}  // namespace

Session::Session(SessionConfig config) : config_(std::move(config)), env_(config_.default_env) {}

Session::~Session() = default;

std::vector<json> Session::fail(std::string_view code, std::string_view message) {
  closed_ = true;
  phase_ = Phase::idle;
  replayer_.reset();
  keys_ = {};
  return {error_frame(code, message)};
}

void Session::start_world(const std::string& env) {
  auto world = sim::load_environment(env);
  env_ = env;
  sim_ = std::make_unique<sim::Simulator>(std::move(world), tasks::sim_config(config_.noise),
                                          config_.sim_seed);
  step_ = 0;
  pending_replace_ = false;
}

std::vector<json> Session::receive(std::string_view text) {
  Message msg;
  try {
    msg = parse_message(text);
  } catch (const ProtocolError& e) {
    return fail("bad_message", e.what());
  }
  return handle(msg);
}

std::vector<json> Session::handle(const Message& message) {
  if (closed_ && !std::holds_alternative<Hello>(message)) {
    return {error_frame("closed", "session is closed; send hello to reopen")};
  }
  return std::visit(
      Overload{
          [&](const Hello&) -> std::vector<json> {
            closed_ = false;
            return {{{"type", "hello"},
                     {"phase", to_string(phase_)},
                     {"environments", sim::environment_names()},
                     {"has_episode", episode_.has_value()}}};
          },
          [&](const StartTeach& m) -> std::vector<json> {
            const std::string env = m.env.empty() ? config_.default_env : m.env;
            try {
              start_world(env);
            } catch (const sim::UnknownEnvironment& e) {
              return fail("bad_message", e.what());
            }
            replayer_.reset();
            recording_ = Episode(Episode::kDefaultCycle);
            keys_ = {};
            phase_ = Phase::teach;
            return {ack("start_teach")};
          },
          [&](const Keys& m) -> std::vector<json> {
            keys_ = m.keys;
            return {};
          },
          [&](const ResetPose&) -> std::vector<json> {
            if (phase_ == Phase::teach) {
              pending_replace_ = true;
            } else if (phase_ == Phase::replay) {
              replayer_->replace(sim_->world().start);
            } else {
              return fail("bad_message", "reset_pose outside teach or replay");
            }
            return {ack("reset_pose")};
          },
          [&](const SaveEpisode& m) -> std::vector<json> {
            if (phase_ != Phase::teach) return fail("bad_message", "save_episode outside teach");
            Episode trimmed;
            try {
              trimmed = trim(recording_, m.trim, m.trim);
            } catch (const EpisodeTooShort& e) {
              return {error_frame("episode_too_short", e.what())};
            }
            if (m.path) {
              try {
                save_episode(trimmed, *m.path);
              } catch (const std::exception& e) {
                return {error_frame("io_error", e.what())};
              }
            }
            phase_ = Phase::idle;
            keys_ = {};
            json out = {{"type", "saved"},
                        {"raw_length", recording_.length()},
                        {"length", trimmed.length()}};
            if (m.path) out["path"] = *m.path;
            episode_ = std::move(trimmed);
            return {out};
          },
          [&](const LoadEpisode& m) -> std::vector<json> {
            if (phase_ != Phase::idle) return fail("bad_message", "load_episode while running");
            try {
              auto ep = load_episode(m.path);
              if (m.env) sim::load_environment(*m.env);
              episode_ = std::move(ep);
              if (m.env) env_ = *m.env;
            } catch (const std::exception& e) {
              return {error_frame("io_error", e.what())};
            }
            return {{{"type", "loaded"}, {"length", episode_->length()}, {"env", env_}}};
          },
          [&](const StartReplay& m) -> std::vector<json> {
            if (!episode_) return fail("bad_message", "start_replay without an episode");
            if (episode_->length() < 2) {
              return fail("bad_message", "start_replay needs an episode with at least 2 events");
            }
            start_world(env_);
            tasks::ReplayConfig rc;
            rc.policy = m.policy;
            rc.particles = m.particles;
            rc.filter.kernel.delta = m.delta;
            rc.seed = m.seed;
            replayer_ = std::make_unique<tasks::Replayer>(*sim_, *episode_, rc);
            keys_ = {};
            phase_ = Phase::replay;
            return {ack("start_replay")};
          },
          [&](const Stop&) -> std::vector<json> {
            phase_ = Phase::idle;
            replayer_.reset();
            keys_ = {};
            return {ack("stop")};
          },
          [&](const Close&) -> std::vector<json> {
            closed_ = true;
            phase_ = Phase::idle;
            replayer_.reset();
            keys_ = {};
            return {{{"type", "closed"}}};
          },
      },
      message);
}

std::optional<StateFrame> Session::tick() {
  if (closed_ || phase_ == Phase::idle) return std::nullopt;
  StateFrame f;
  f.phase = phase_;
  f.keys = keys_;
  if (phase_ == Phase::teach) {
    if (pending_replace_) {
      sim_->teleport(sim_->world().start);
      pending_replace_ = false;
    }
    f.action = tasks::action_from_keys(keys_);
    sim_->apply(f.action);
    f.z = sim_->sense();
    recording_.record(f.action, f.z);
    f.step = ++step_;
    f.pose = sim_->pose();
    return f;
  }
  const auto s = replayer_->step();
  f.step = ++step_;
  f.pose = s.pose;
  f.z = s.z;
  f.action = s.action;
  f.mode_t = s.mode_t;
  f.mode_mass = s.mode_mass;
  f.belief_bins = belief_histogram(replayer_->filter().particles());
  return f;
}

}  // namespace pfoe::bridge
