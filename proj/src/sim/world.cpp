#include "pfoe/sim/world.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace pfoe::sim {

namespace {

// Only the 500 mm start distance of the counting task is a measured value.
// The other dimensions are plausible desk-scale choices (corridors 0.24 m
// wide for a 0.12 m robot).
constexpr std::string_view kCountingWall = R"(
# single wall 0.5 m in front of the start pose
wall 0.5 -1.0 0.5 1.0
start 0 0 0
region start -0.1 -0.1 0.1 0.1
region near_wall 0.3 -1.0 0.5 1.0
)";

// Start corridor north, corner to the east, then a junction with three
// dead-end pockets: A north, B east, C south.
constexpr std::string_view kChoiceMaze = R"(
wall -0.12 -0.12 -0.12 0.60
wall -0.12 -0.12 0.12 -0.12
wall 0.12 -0.12 0.12 0.36
wall -0.12 0.60 0.60 0.60
wall 0.12 0.36 0.60 0.36
wall 0.60 0.60 0.60 1.08
wall 0.84 0.60 0.84 1.08
wall 0.60 1.08 0.84 1.08
wall 0.84 0.60 1.32 0.60
wall 0.84 0.36 1.32 0.36
wall 1.32 0.36 1.32 0.60
wall 0.60 0.36 0.60 -0.12
wall 0.84 0.36 0.84 -0.12
wall 0.60 -0.12 0.84 -0.12
start 0 0 1.5707963267948966
region S -0.12 -0.12 0.12 0.12
region A 0.60 0.72 0.84 1.08
region B 0.96 0.36 1.32 0.60
region C 0.60 -0.12 0.84 0.24
region junction 0.60 0.36 0.84 0.60
)";

// Straight corridor 1 m wide. The taught loop runs east along the south
// wall (B), crosses north (C), runs west along the north wall (D) and
// crosses back south (A).
constexpr std::string_view kRectCorridor = R"(
wall -0.3 0.0 1.8 0.0
wall -0.3 1.0 1.8 1.0
wall -0.3 0.0 -0.3 1.0
wall 1.8 0.0 1.8 1.0
start 0.2 0.12 0
region A -0.3 0.0 0.2 1.0
region B 0.2 0.0 1.3 0.35
region C 1.3 0.0 1.8 1.0
region D 0.2 0.65 1.3 1.0
region goal 1.4 0.0 1.8 0.35
)";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double number(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("map line " + std::to_string(line_no) + ": bad number '" +
                                std::string(s) + "'");
  }
  return v;
}

}  // namespace

const Region* WorldMap::region(std::string_view n) const {
  for (const auto& r : regions) {
    if (r.name == n) return &r;
  }
  return nullptr;
}

std::optional<std::string> WorldMap::region_at(Vec2 p) const {
  for (const auto& r : regions) {
    if (r.contains(p)) return r.name;
  }
  return std::nullopt;
}

double WorldMap::clearance(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) best = std::min(best, point_segment_distance(s, p));
  return best;
}

std::optional<double> WorldMap::cast(Vec2 origin, double heading, double max_range) const {
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  std::optional<double> best;
  for (const auto& s : segments) {
    auto hit = ray_segment_intersect(origin, dir, s);
    if (hit && *hit <= max_range && (!best || *hit < *best)) best = hit;
  }
  return best;
}

WorldMap parse_world(std::string_view text, std::string name) {
  WorldMap world;
  world.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto f = split_ws(line);
    if (f.empty()) continue;
    if (f[0] == "wall") {
      if (f.size() != 5) {
        throw std::invalid_argument("map line " + std::to_string(line_no) +
                                    ": expected 'wall x1 y1 x2 y2'");
      }
      Segment s{{number(f[1], line_no), number(f[2], line_no)},
                {number(f[3], line_no), number(f[4], line_no)}};
      if (s.length() <= 0.0) {
        throw std::invalid_argument("map line " + std::to_string(line_no) +
                                    ": degenerate wall segment");
      }
      world.segments.push_back(s);
    } else if (f[0] == "region") {
      if (f.size() != 6) {
        throw std::invalid_argument("map line " + std::to_string(line_no) +
                                    ": expected 'region name x1 y1 x2 y2'");
      }
      const double x1 = number(f[2], line_no), y1 = number(f[3], line_no);
      const double x2 = number(f[4], line_no), y2 = number(f[5], line_no);
      world.regions.push_back(Region{std::string(f[1]),
                                     {std::min(x1, x2), std::min(y1, y2)},
                                     {std::max(x1, x2), std::max(y1, y2)}});
    } else if (f[0] == "start") {
      if (f.size() != 4) {
        throw std::invalid_argument("map line " + std::to_string(line_no) +
                                    ": expected 'start x y theta'");
      }
      world.start = Pose{number(f[1], line_no), number(f[2], line_no),
                         normalize_angle(number(f[3], line_no))};
    } else {
      throw std::invalid_argument("map line " + std::to_string(line_no) + ": unknown item '" +
                                  std::string(f[0]) + "'");
    }
    if (end == text.size()) break;
  }
  return world;
}

WorldMap load_environment(std::string_view name) {
  if (name == "counting_wall") return parse_world(kCountingWall, "counting_wall");
  if (name == "choice_maze") return parse_world(kChoiceMaze, "choice_maze");
  if (name == "rect_corridor") return parse_world(kRectCorridor, "rect_corridor");
  throw UnknownEnvironment("unknown environment '" + std::string(name) +
                           "' (expected counting_wall, choice_maze or rect_corridor)");
}

std::vector<std::string> environment_names() {
  return {"counting_wall", "choice_maze", "rect_corridor"};
}

WorldMap load_world_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_world(ss.str(), path);
}

std::string format_world(const WorldMap& world) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& s : world.segments) {
    os << "wall " << s.a.x << ' ' << s.a.y << ' ' << s.b.x << ' ' << s.b.y << '\n';
  }
  for (const auto& r : world.regions) {
    os << "region " << r.name << ' ' << r.min.x << ' ' << r.min.y << ' ' << r.max.x << ' '
       << r.max.y << '\n';
  }
  os << "start " << world.start.x << ' ' << world.start.y << ' ' << world.start.theta << '\n';
  return os.str();
}

}  // namespace pfoe::sim
