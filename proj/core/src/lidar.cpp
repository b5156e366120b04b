#include "rico/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rico {

LidarScan lidar_scan(const WorldState& world, const LidarConfig& cfg) {
  const Vec2 origin = world.robot.position();
  for (const Rect& r : world.obstacles) {
    if (r.contains_strict(origin)) throw WorldError("lidar origin inside an obstacle");
  }
  LidarScan scan;
  scan.max_range = cfg.max_range;
  scan.timestamp = world.clock;
  scan.ranges.resize(static_cast<std::size_t>(cfg.beams));
  const double step = 2.0 * std::numbers::pi / cfg.beams;
  for (int i = 0; i < cfg.beams; ++i) {
    const double a = world.robot.theta + i * step;
    const Vec2 dir{std::cos(a), std::sin(a)};
    double best = cfg.max_range;
    for (const Rect& r : world.obstacles) {
      if (auto t = ray_rect(origin, dir, r, best); t && *t > 0.0) best = std::min(best, *t);
    }
    for (const SimObject& o : world.objects) {
      if (o.on_table()) continue;
      if (auto t = ray_circle(origin, dir, o.position, o.footprint_radius); t && *t > 0.0) best = std::min(best, *t);
    }
    for (const Person& p : world.persons) {
      if (auto t = ray_circle(origin, dir, p.position, cfg.person_radius); t && *t > 0.0) best = std::min(best, *t);
    }
    scan.ranges[static_cast<std::size_t>(i)] = best;
  }
  return scan;
}

}  // namespace rico
