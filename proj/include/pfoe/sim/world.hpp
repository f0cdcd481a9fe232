#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfoe/sim/geometry.hpp"

namespace pfoe::sim {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Axis-aligned named area used by task evaluators (start zones, pockets,
/// corridor intervals).
struct Region {
  std::string name;
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

class UnknownEnvironment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct WorldMap {
  std::string name;
  std::vector<Segment> segments;
  std::vector<Region> regions;
  Pose start;

  const Region* region(std::string_view name) const;
  /// Name of the first region containing p, if any.
  std::optional<std::string> region_at(Vec2 p) const;
  /// Distance from p to the nearest wall (infinity for an empty map).
  double clearance(Vec2 p) const;
  /// Distance along the unit ray to the nearest wall, capped at max_range;
  /// nullopt when nothing is hit within max_range.
  std::optional<double> cast(Vec2 origin, double heading, double max_range) const;
};

/// Built-in fixtures: counting_wall, choice_maze, rect_corridor.
WorldMap load_environment(std::string_view name);
std::vector<std::string> environment_names();

/// Text format, one item per line ('#' starts a comment):
///   wall x1 y1 x2 y2
///   region <name> x1 y1 x2 y2
///   start x y theta
WorldMap parse_world(std::string_view text, std::string name = "custom");
WorldMap load_world_file(const std::string& path);
std::string format_world(const WorldMap& world);

}  // namespace pfoe::sim
