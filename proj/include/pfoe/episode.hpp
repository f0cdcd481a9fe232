#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfoe {

/// Velocity command of a differential-drive robot.
struct Action {
  double v_linear = 0.0;   // m/s
  double v_angular = 0.0;  // rad/s

  friend bool operator==(const Action&, const Action&) = default;
};

/// Sanity bounds for recorded actions.
struct ActionBounds {
  double max_linear = 1.0;
  double max_angular = 3.14159265358979323846;
};

/// Throws std::invalid_argument when the action is non-finite or out of bounds.
void validate(const Action& a, const ActionBounds& bounds = {});

enum class Channel : std::size_t { lf = 0, ls = 1, rs = 2, rf = 3 };
inline constexpr std::size_t kChannels = 4;
inline constexpr std::array<std::string_view, kChannels> kChannelNames{"z_lf", "z_ls", "z_rs",
                                                                        "z_rf"};

/// Raw intensity counts of the four range sensors (left forward, left side,
/// right side, right forward). Every channel is >= 1 so that log10 is defined.
struct Observation {
  std::array<std::int32_t, kChannels> z{1, 1, 1, 1};

  std::int32_t operator[](Channel c) const { return z[static_cast<std::size_t>(c)]; }

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Clamps raw readings to the valid range (0 and negatives become 1).
Observation clamp_observation(std::array<std::int64_t, kChannels> raw);

/// Throws std::invalid_argument naming the first channel below 1.
void validate(const Observation& z);

struct Event {
  Action action;
  Observation observation;

  friend bool operator==(const Event&, const Event&) = default;
};

class EpisodeTooShort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Ordered event sequence e_1..e_T of one teaching phase.
///
/// Indexing is 1-based: index 0 is the start of teaching and carries no event.
class Episode {
 public:
  static constexpr double kDefaultCycle = 0.1;

  Episode() = default;
  explicit Episode(double cycle_duration);
  Episode(std::vector<Event> events, double cycle_duration = kDefaultCycle);

  /// Appends e_{T+1}.
  void record(const Action& a, const Observation& z);

  std::size_t length() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  double cycle_duration() const { return cycle_; }

  /// 1-based access, 1 <= t <= T. Unchecked.
  const Event& operator[](std::size_t t) const { return events_[t - 1]; }
  const Action& action(std::size_t t) const { return events_[t - 1].action; }
  const Observation& observation(std::size_t t) const { return events_[t - 1].observation; }

  /// 1-based access with range check.
  const Event& at(std::size_t t) const;

  const std::vector<Event>& events() const { return events_; }

  friend bool operator==(const Episode&, const Episode&) = default;

 private:
  std::vector<Event> events_;
  double cycle_ = kDefaultCycle;
};

/// Functional form of Episode::record.
Episode record_event(Episode episode, const Action& a, const Observation& z);

/// Drops floor(head/cycle) events from the front and floor(tail/cycle) from
/// the back. Throws EpisodeTooShort when nothing would remain.
Episode trim(const Episode& episode, double head_seconds, double tail_seconds);

/// Number of events covered by `seconds` at the given cycle duration.
std::size_t cycles_in(double seconds, double cycle_duration);

// Text format:
//   pfoe-episode v1 cycle=<seconds>
//   <t> <v_linear> <v_angular> <z_lf> <z_ls> <z_rs> <z_rf>
std::string serialize(const Episode& episode);
void serialize(const Episode& episode, std::ostream& out);
Episode deserialize(std::string_view text);
Episode deserialize(std::istream& in);

Episode load_episode(const std::string& path);
void save_episode(const Episode& episode, const std::string& path);

}  // namespace pfoe
