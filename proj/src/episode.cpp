#include "pfoe/episode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace pfoe {

namespace {

constexpr std::string_view kMagic = "pfoe-episode";
constexpr std::string_view kVersion = "v1";
constexpr std::string_view kCyclePrefix = "cycle=";

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format value");
  return std::string(buf, end);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

double parse_cycle(std::string_view header, std::size_t line_no) {
  auto fields = split_ws(header);
  if (fields.size() != 3 || fields[0] != kMagic) {
    throw ParseError(line_no, "expected header 'pfoe-episode v1 cycle=<seconds>'");
  }
  if (fields[1] != kVersion) {
    throw ParseError(line_no, "unsupported episode version '" + std::string(fields[1]) + "'");
  }
  if (fields[2].substr(0, kCyclePrefix.size()) != kCyclePrefix) {
    throw ParseError(line_no, "missing cycle=<seconds> in header");
  }
  double cycle = 0.0;
  if (!parse_number(fields[2].substr(kCyclePrefix.size()), cycle) || !std::isfinite(cycle) ||
      cycle <= 0.0) {
    throw ParseError(line_no, "cycle must be a positive number");
  }
  return cycle;
}

Event parse_event(std::string_view line, std::size_t line_no, std::size_t expected_t) {
  auto fields = split_ws(line);
  if (fields.size() != 7) {
    throw ParseError(line_no, "expected 7 fields 't v_linear v_angular z_lf z_ls z_rs z_rf', got " +
                                  std::to_string(fields.size()));
  }
  std::size_t t = 0;
  if (!parse_number(fields[0], t)) throw ParseError(line_no, "t must be a positive integer");
  if (t != expected_t) {
    throw ParseError(line_no,
                     "t must be " + std::to_string(expected_t) + ", got " + std::to_string(t));
  }
  Event e;
  if (!parse_number(fields[1], e.action.v_linear) || !std::isfinite(e.action.v_linear)) {
    throw ParseError(line_no, "v_linear must be a finite number");
  }
  if (!parse_number(fields[2], e.action.v_angular) || !std::isfinite(e.action.v_angular)) {
    throw ParseError(line_no, "v_angular must be a finite number");
  }
  for (std::size_t j = 0; j < kChannels; ++j) {
    std::int64_t v = 0;
    if (!parse_number(fields[3 + j], v)) {
      throw ParseError(line_no, std::string(kChannelNames[j]) + " must be an integer");
    }
    if (v < 1 || v > INT32_MAX) {
      throw ParseError(line_no, std::string(kChannelNames[j]) + " must be an integer >= 1, got " +
                                    std::to_string(v));
    }
    e.observation.z[j] = static_cast<std::int32_t>(v);
  }
  return e;
}

}  // namespace

void validate(const Action& a, const ActionBounds& bounds) {
  if (!std::isfinite(a.v_linear) || !std::isfinite(a.v_angular)) {
    throw std::invalid_argument("action components must be finite");
  }
  if (std::abs(a.v_linear) > bounds.max_linear) {
    throw std::invalid_argument("v_linear out of bounds");
  }
  if (std::abs(a.v_angular) > bounds.max_angular) {
    throw std::invalid_argument("v_angular out of bounds");
  }
}

Observation clamp_observation(std::array<std::int64_t, kChannels> raw) {
  Observation z;
  for (std::size_t j = 0; j < kChannels; ++j) {
    z.z[j] = static_cast<std::int32_t>(std::clamp<std::int64_t>(raw[j], 1, INT32_MAX));
  }
  return z;
}

void validate(const Observation& z) {
  for (std::size_t j = 0; j < kChannels; ++j) {
    if (z.z[j] < 1) {
      throw std::invalid_argument(std::string(kChannelNames[j]) + " must be >= 1");
    }
  }
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

Episode::Episode(double cycle_duration) : cycle_(cycle_duration) {
  if (!(cycle_duration > 0.0) || !std::isfinite(cycle_duration)) {
    throw std::invalid_argument("cycle duration must be positive");
  }
}

Episode::Episode(std::vector<Event> events, double cycle_duration) : Episode(cycle_duration) {
  events_ = std::move(events);
}

void Episode::record(const Action& a, const Observation& z) { events_.push_back({a, z}); }

const Event& Episode::at(std::size_t t) const {
  if (t < 1 || t > events_.size()) {
    throw std::out_of_range("episode index " + std::to_string(t) + " outside 1.." +
                            std::to_string(events_.size()));
  }
  return events_[t - 1];
}

Episode record_event(Episode episode, const Action& a, const Observation& z) {
  episode.record(a, z);
  return episode;
}

std::size_t cycles_in(double seconds, double cycle_duration) {
  if (seconds < 0.0 || !std::isfinite(seconds)) {
    throw std::invalid_argument("trim duration must be a non-negative number");
  }
  // 5.0 / 0.1 evaluates just below 50 in binary floating point.
  return static_cast<std::size_t>(std::floor(seconds / cycle_duration + 1e-9));
}

Episode trim(const Episode& episode, double head_seconds, double tail_seconds) {
  const std::size_t head = cycles_in(head_seconds, episode.cycle_duration());
  const std::size_t tail = cycles_in(tail_seconds, episode.cycle_duration());
  const std::size_t T = episode.length();
  if (T <= head + tail) {
    throw EpisodeTooShort("episode of " + std::to_string(T) + " events is too short to drop " +
                          std::to_string(head) + " head and " + std::to_string(tail) +
                          " tail events");
  }
  const auto& ev = episode.events();
  return Episode(std::vector<Event>(ev.begin() + static_cast<std::ptrdiff_t>(head),
                                    ev.end() - static_cast<std::ptrdiff_t>(tail)),
                 episode.cycle_duration());
}

void serialize(const Episode& episode, std::ostream& out) {
  out << kMagic << ' ' << kVersion << ' ' << kCyclePrefix << format_double(episode.cycle_duration())
      << '\n';
  for (std::size_t t = 1; t <= episode.length(); ++t) {
    const Event& e = episode[t];
    out << t << ' ' << format_double(e.action.v_linear) << ' '
        << format_double(e.action.v_angular);
    for (auto v : e.observation.z) out << ' ' << v;
    out << '\n';
  }
}

std::string serialize(const Episode& episode) {
  std::ostringstream os;
  serialize(episode, os);
  return os.str();
}

Episode deserialize(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Episode episode(parse_cycle(line, line_no));
  std::vector<Event> events;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_ws(line).empty()) continue;
    events.push_back(parse_event(line, line_no, events.size() + 1));
  }
  return Episode(std::move(events), episode.cycle_duration());
}

Episode deserialize(std::string_view text) {
  std::istringstream is{std::string(text)};
  return deserialize(is);
}

Episode load_episode(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open episode file '" + path + "'");
  return deserialize(in);
}

void save_episode(const Episode& episode, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write episode file '" + path + "'");
  serialize(episode, out);
  if (!out) throw std::runtime_error("failed writing episode file '" + path + "'");
}

}  // namespace pfoe
