#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rico/world.hpp"

namespace rico {

/// Occupancy over the world bounds. A cell is blocked when its center is
/// closer than `inflation` to an obstacle; inflation covers the robot radius,
/// the planning margin and half a cell diagonal, so straight moves between
/// free neighbours keep radius + margin of clearance.
struct OccupancyGrid {
  Vec2 origin;
  double resolution = 0.1;
  int width = 0;
  int height = 0;
  double inflation = 0.0;
  std::vector<std::uint8_t> blocked;

  bool in_range(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width && cy < height; }
  bool is_free(int cx, int cy) const {
    return in_range(cx, cy) && blocked[static_cast<std::size_t>(cy) * width + cx] == 0;
  }
  Vec2 center(int cx, int cy) const {
    return {origin.x + (cx + 0.5) * resolution, origin.y + (cy + 0.5) * resolution};
  }
};

inline constexpr double kDefaultPlanningMargin = 0.05;

OccupancyGrid build_occupancy(const WorldState& world, double resolution = 0.1,
                              double margin = kDefaultPlanningMargin);

using Path = std::vector<Vec2>;

double path_length(const Path& path);

/// Plans from the robot position to `goal` with 8-connected A* over the
/// occupancy grid, then greedily shortcuts the cell path. Every segment keeps
/// at least the robot radius of clearance; segments other than the first and
/// last also keep `margin`. Returns nullopt when the goal is out of bounds,
/// in collision, or unreachable.
std::optional<Path> plan_path(const WorldState& world, Vec2 goal, double margin = kDefaultPlanningMargin);

}  // namespace rico
