#include "pfoe/bridge/server.hpp"

#include <sys/socket.h>

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <future>
#include <mutex>
#include <thread>

#include "httplib.h"

namespace pfoe::bridge {

using nlohmann::json;

int port_from_env(int fallback) {
  const char* v = std::getenv("PFOE_PORT");
  if (!v || !*v) return fallback;
  const std::string_view s(v);
  int port = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), port);
  if (ec != std::errc{} || ptr != s.data() + s.size() || port < 0 || port > 65535) {
    throw std::invalid_argument("PFOE_PORT must be a port number, got '" + std::string(s) + "'");
  }
  return port;
}

namespace {

/// Bounded frame queue for one subscriber; push never blocks.
class FrameQueue {
 public:
  explicit FrameQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

  void push(std::string frame) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return;
      if (frames_.size() == capacity_) {
        frames_.pop_front();
        ++dropped_;
      }
      frames_.push_back(std::move(frame));
    }
    cv_.notify_one();
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    cv_.notify_all();
  }

  /// Waits up to `timeout`. Returns frames taken, or nullopt once closed and drained.
  std::optional<std::deque<std::string>> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || !frames_.empty(); });
    if (frames_.empty() && closed_) return std::nullopt;
    std::deque<std::string> out;
    out.swap(frames_);
    return out;
  }

 private:
  std::size_t capacity_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::string> frames_;
  std::size_t dropped_ = 0;
  bool closed_ = false;
};

struct Pending {
  std::string text;
  std::promise<std::vector<json>> reply;
};

}  // namespace

struct Server::Impl {
  ServerConfig config;
  Session session;
  httplib::Server http;
  int port = 0;

  std::thread http_thread;
  std::thread loop_thread;
  std::atomic<bool> running{false};

  std::mutex inbox_mutex;
  std::deque<std::unique_ptr<Pending>> inbox;
  std::optional<tasks::KeyState> latest_keys;

  std::mutex sub_mutex;
  std::shared_ptr<FrameQueue> subscriber;

  std::mutex stop_mutex;
  std::condition_variable stop_cv;

  explicit Impl(ServerConfig c) : config(std::move(c)), session(config.session) {}

  void publish(const json& frame) {
    std::shared_ptr<FrameQueue> q;
    {
      std::lock_guard lock(sub_mutex);
      q = subscriber;
    }
    if (q) q->push(frame.dump());
  }

  void close_subscriber() {
    std::lock_guard lock(sub_mutex);
    if (subscriber) subscriber->close();
    subscriber.reset();
  }

  void loop() {
    auto next = std::chrono::steady_clock::now();
    while (running) {
      std::deque<std::unique_ptr<Pending>> batch;
      std::optional<tasks::KeyState> keys;
      {
        std::lock_guard lock(inbox_mutex);
        batch.swap(inbox);
        keys.swap(latest_keys);
      }
      if (keys) session.handle(Keys{*keys});
      for (auto& p : batch) {
        const bool was_closed = session.closed();
        auto frames = session.receive(p->text);
        for (const auto& f : frames) publish(f);
        if (!was_closed && session.closed()) close_subscriber();
        p->reply.set_value(std::move(frames));
      }
      if (auto frame = session.tick()) publish(to_json(*frame));

      next += config.period;
      const auto now = std::chrono::steady_clock::now();
      if (next < now) next = now;
      std::unique_lock lock(stop_mutex);
      stop_cv.wait_until(lock, next, [&] { return !running; });
    }
    std::lock_guard lock(inbox_mutex);
    for (auto& p : inbox) p->reply.set_value({error_frame("shutdown", "server stopping")});
    inbox.clear();
  }

  void routes() {
    http.Post("/message", [this](const httplib::Request& req, httplib::Response& res) {
      // Key states bypass the queue: only the latest one per cycle matters.
      try {
        auto msg = parse_message(req.body);
        if (auto* k = std::get_if<Keys>(&msg)) {
          std::lock_guard lock(inbox_mutex);
          if (!session.closed()) {
            latest_keys = k->keys;
            res.set_content("[]", "application/json");
            return;
          }
        }
      } catch (const ProtocolError&) {
        // handled by the loop, which closes the session
      }
      auto pending = std::make_unique<Pending>();
      pending->text = req.body;
      auto reply = pending->reply.get_future();
      {
        std::lock_guard lock(inbox_mutex);
        if (!running) {
          res.status = 503;
          return;
        }
        inbox.push_back(std::move(pending));
      }
      res.set_content(json(reply.get()).dump(), "application/json");
    });

    http.Get("/frames", [this](const httplib::Request&, httplib::Response& res) {
      auto queue = std::make_shared<FrameQueue>(config.frame_queue);
      {
        std::lock_guard lock(sub_mutex);
        if (subscriber) subscriber->close();
        subscriber = queue;
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [this, queue](std::size_t, httplib::DataSink& sink) {
            auto frames = queue->pop(std::chrono::milliseconds(250));
            if (!frames || !running) {
              sink.done();
              return true;
            }
            if (frames->empty()) {
              static constexpr std::string_view kKeepAlive = ": keep-alive\n\n";
              return sink.write(kKeepAlive.data(), kKeepAlive.size());
            }
            for (const auto& f : *frames) {
              const std::string event = "data: " + f + "\n\n";
              if (!sink.write(event.data(), event.size())) return false;
            }
            return true;
          },
          [this, queue](bool) {
            queue->close();
            std::lock_guard lock(sub_mutex);
            if (subscriber == queue) subscriber.reset();
          });
    });

    if (!config.static_dir.empty() && std::filesystem::is_directory(config.static_dir)) {
      http.set_mount_point("/", config.static_dir);
    }
  }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& d = *impl_;
  if (d.running) return;
  if (d.config.period.count() <= 0) throw std::invalid_argument("period must be > 0");
  // Plain SO_REUSEADDR so a second server on the same port fails to bind.
  d.http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  d.routes();
  if (d.config.port == 0) {
    d.port = d.http.bind_to_any_port(d.config.host);
    if (d.port < 0) throw PortInUse("cannot bind " + d.config.host);
  } else {
    if (!d.http.bind_to_port(d.config.host, d.config.port)) {
      throw PortInUse("port " + std::to_string(d.config.port) + " on " + d.config.host +
                      " is in use");
    }
    d.port = d.config.port;
  }
  d.running = true;
  d.loop_thread = std::thread([&d] { d.loop(); });
  d.http_thread = std::thread([&d] { d.http.listen_after_bind(); });
  d.http.wait_until_ready();
}

void Server::stop() {
  auto& d = *impl_;
  if (!d.running.exchange(false)) return;
  d.stop_cv.notify_all();
  d.close_subscriber();
  if (d.loop_thread.joinable()) d.loop_thread.join();
  d.http.stop();
  if (d.http_thread.joinable()) d.http_thread.join();
}

void Server::wait() {
  auto& d = *impl_;
  if (d.http_thread.joinable()) d.http_thread.join();
}

int Server::port() const { return impl_->port; }

}  // namespace pfoe::bridge
