#pragma once

#include <vector>

#include "rico/world.hpp"

namespace rico {

struct LidarConfig {
  int beams = 360;
  double max_range = 10.0;
  double person_radius = 0.2;
};

/// ranges[i] is the beam at bearing i * 360/beams degrees in the robot frame.
struct LidarScan {
  std::vector<double> ranges;
  double max_range = 10.0;
  double timestamp = 0.0;
  friend bool operator==(const LidarScan&, const LidarScan&) = default;
};

/// Casts every beam against obstacles, floor objects and persons.
/// Throws WorldError when the robot center is inside an obstacle.
LidarScan lidar_scan(const WorldState& world, const LidarConfig& cfg = {});

}  // namespace rico
