#include "pfoe/bridge/protocol.hpp"

#include <cmath>

namespace pfoe::bridge {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* name) {
  const auto it = obj.find(name);
  if (it == obj.end()) throw ProtocolError(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_string()) throw ProtocolError(std::string("'") + name + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* name, double fallback) {
  const auto it = obj.find(name);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw ProtocolError(std::string("'") + name + "' must be a number");
  return it->get<double>();
}

std::uint64_t unsigned_field(const json& obj, const char* name, std::uint64_t fallback) {
  const auto it = obj.find(name);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw ProtocolError(std::string("'") + name + "' must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

bool key_field(const json& keys, const char* name) {
  const auto it = keys.find(name);
  if (it == keys.end()) return false;
  if (!it->is_boolean()) throw ProtocolError(std::string("key '") + name + "' must be a boolean");
  return it->get<bool>();
}

json keys_json(const tasks::KeyState& k) {
  return {{"up", k.up}, {"left", k.left}, {"right", k.right}, {"down", k.down}};
}

}  // namespace

Message parse_message(std::string_view text) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("not JSON: ") + e.what());
  }
  if (!msg.is_object()) throw ProtocolError("message must be a JSON object");
  const std::string type = string_field(msg, "type");

  if (type == "hello") return Hello{};
  if (type == "start_teach") {
    StartTeach m;
    if (msg.contains("env")) m.env = string_field(msg, "env");
    return m;
  }
  if (type == "keys") {
    const auto& k = field(msg, "keys");
    if (!k.is_object()) throw ProtocolError("'keys' must be an object");
    for (const auto& [name, _] : k.items()) {
      if (name != "up" && name != "down" && name != "left" && name != "right") {
        throw ProtocolError("unknown key '" + name + "'");
      }
    }
    return Keys{{key_field(k, "up"), key_field(k, "down"), key_field(k, "left"),
                 key_field(k, "right")}};
  }
  if (type == "reset_pose") return ResetPose{};
  if (type == "save_episode") {
    SaveEpisode m;
    m.trim = number_field(msg, "trim", m.trim);
    if (!(m.trim >= 0.0) || !std::isfinite(m.trim)) throw ProtocolError("'trim' must be >= 0");
    if (msg.contains("path")) m.path = string_field(msg, "path");
    return m;
  }
  if (type == "load_episode") {
    LoadEpisode m;
    m.path = string_field(msg, "path");
    if (msg.contains("env")) m.env = string_field(msg, "env");
    return m;
  }
  if (type == "start_replay") {
    StartReplay m;
    if (msg.contains("policy")) {
      try {
        m.policy = parse_policy(string_field(msg, "policy"));
      } catch (const std::invalid_argument& e) {
        throw ProtocolError(e.what());
      }
    }
    m.particles = unsigned_field(msg, "particles", m.particles);
    if (m.particles < 1 || m.particles > 10'000'000) {
      throw ProtocolError("'particles' must be in [1, 1e7]");
    }
    m.delta = number_field(msg, "delta", m.delta);
    if (!(m.delta >= 0.0 && m.delta <= 1.0)) throw ProtocolError("'delta' must be in [0, 1]");
    m.seed = unsigned_field(msg, "seed", m.seed);
    return m;
  }
  if (type == "stop") return Stop{};
  if (type == "close") return Close{};
  throw ProtocolError("unknown message type '" + type + "'");
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "idle";
    case Phase::teach: return "teach";
    case Phase::replay: return "replay";
  }
  return "idle";
}

json to_json(const StateFrame& f) {
  return {
      {"type", "state"},
      {"phase", to_string(f.phase)},
      {"step", f.step},
      {"pose", {{"x", f.pose.x}, {"y", f.pose.y}, {"theta", f.pose.theta}}},
      {"z", f.z.z},
      {"mode_t", f.mode_t},
      {"mode_mass", f.mode_mass},
      {"belief_bins", f.belief_bins},
      {"keys", keys_json(f.keys)},
      {"action", {{"v_linear", f.action.v_linear}, {"v_angular", f.action.v_angular}}},
  };
}

json error_frame(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

std::vector<double> belief_histogram(const ParticleSet& ps, std::size_t max_bins) {
  const std::size_t T = ps.episode_length;
  if (T == 0 || max_bins == 0) return {};
  const std::size_t bins = std::min(T, max_bins);
  std::vector<double> out(bins, 0.0);
  double total = 0.0;
  for (const auto& p : ps.particles) {
    out[(static_cast<std::size_t>(p.t) - 1) * bins / T] += p.w;
    total += p.w;
  }
  if (total > 0.0) {
    for (auto& b : out) b /= total;
  }
  return out;
}

}  // namespace pfoe::bridge
