#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "pfoe/bridge/session.hpp"

namespace pfoe::bridge {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::string static_dir;  // served at / when non-empty
  std::chrono::milliseconds period{100};
  std::size_t frame_queue = 256;
  SessionConfig session;
};

class PortInUse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Port from PFOE_PORT, or `fallback` when unset. Throws invalid_argument on
/// a malformed value.
int port_from_env(int fallback);

/// HTTP endpoint around one Session.
///   POST /message   one JSON message; the reply body is a JSON array of the
///                   immediate frames
///   GET  /frames    server-sent events, one JSON frame per `data:` line
///   GET  /          static UI files when configured
/// The control loop runs on its own thread at `period`; it never waits for
/// clients. Frames go to a bounded queue that drops the oldest entries, and
/// key states are latest-wins per cycle.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving in the background. Throws PortInUse.
  void start();
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pfoe::bridge
