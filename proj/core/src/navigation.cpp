#include "rico/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rico {

namespace {
constexpr int kMaxReplans = 5;
}

bool Navigator::go_to(const WorldState& world, Vec2 goal, double tolerance) {
  goal_ = goal;
  tolerance_ = tolerance;
  replans_ = 0;
  return replan(world);
}

bool Navigator::replan(const WorldState& world) {
  if (!goal_) return false;
  stuck_ = 0;
  if (distance(world.robot.position(), *goal_) <= tolerance_) {
    path_ = {world.robot.position()};
    next_ = 1;
    status_ = Status::Arrived;
    return true;
  }
  auto path = plan_path(world, *goal_, cfg_.planning_margin);
  if (!path) {
    path_.clear();
    status_ = Status::Failed;
    return false;
  }
  path_ = std::move(*path);
  next_ = path_.size() > 1 ? 1 : 0;
  status_ = Status::Moving;
  return true;
}

void Navigator::cancel() {
  goal_.reset();
  path_.clear();
  status_ = Status::Idle;
}

Navigator::Status Navigator::update(const WorldState& world, BaseCommand& cmd) {
  cmd = {};
  if (status_ != Status::Moving) return status_;
  const Vec2 pos = world.robot.position();
  if (distance(pos, *goal_) <= tolerance_) {
    status_ = Status::Arrived;
    return status_;
  }

  stuck_ = world.collided ? stuck_ + 1 : 0;
  if (stuck_ >= cfg_.stuck_ticks) {
    if (++replans_ > kMaxReplans || !replan(world)) {
      status_ = Status::Failed;
      return status_;
    }
  }

  while (next_ + 1 < path_.size() && distance(pos, path_[next_]) <= cfg_.waypoint_tolerance) ++next_;
  const Vec2 target = path_[std::min(next_, path_.size() - 1)];
  const Vec2 rel = target - pos;
  const double err = normalize_angle(std::atan2(rel.y, rel.x) - world.robot.theta);
  const double w = std::clamp(cfg_.turn_gain * err, -cfg_.max_turn_rate, cfg_.max_turn_rate);
  if (std::abs(err) > cfg_.heading_tolerance) {
    cmd = {0.0, w};
    return status_;
  }
  const bool last = next_ + 1 >= path_.size();
  const double remaining = rel.norm();
  double v = cfg_.speed;
  if (last) v = std::min(v, 0.8 * remaining + 0.05);
  cmd = {v * std::cos(err), w};
  return status_;
}

std::optional<Vec2> approach_point(const WorldState& world, Vec2 target, Vec2 from, double dist) {
  const Vec2 rel = from - target;
  const double base = rel.norm() > 1e-9 ? std::atan2(rel.y, rel.x) : 0.0;
  constexpr int kHeadings = 16;
  for (int k = 0; k < kHeadings; ++k) {
    // 0, +1, -1, +2, -2, ... steps around the preferred side.
    const int s = (k + 1) / 2 * (k % 2 ? 1 : -1);
    const double a = base + s * (2.0 * std::numbers::pi / kHeadings);
    const Vec2 p{target.x + dist * std::cos(a), target.y + dist * std::sin(a)};
    if (world.bounds.contains(p) && clearance(world, p) >= world.limits.radius + 0.02) return p;
  }
  return std::nullopt;
}

}  // namespace rico
