#pragma once

#include <optional>

#include "rico/config.hpp"
#include "rico/planner.hpp"

namespace rico {

/// Plans with plan_path and tracks the result with a rotate-then-drive
/// unicycle controller.
class Navigator {
 public:
  enum class Status { Idle, Moving, Arrived, Failed };

  explicit Navigator(NavigationConfig cfg = {}) : cfg_(cfg) {}

  /// Plans from the current pose. Returns false (and enters Failed) when
  /// no path exists.
  bool go_to(const WorldState& world, Vec2 goal, double tolerance);
  /// Plans again towards the current goal, e.g. after a resume.
  bool replan(const WorldState& world);
  void cancel();

  /// Computes the next base command. Call once per tick.
  Status update(const WorldState& world, BaseCommand& cmd);

  Status status() const { return status_; }
  std::optional<Vec2> goal() const { return goal_; }
  double tolerance() const { return tolerance_; }
  const Path& path() const { return path_; }

 private:
  NavigationConfig cfg_;
  std::optional<Vec2> goal_;
  double tolerance_ = 0.1;
  Path path_;
  std::size_t next_ = 0;
  int stuck_ = 0;
  int replans_ = 0;
  Status status_ = Status::Idle;
};

/// A collision-free point at `distance` from `target`, preferring the side
/// facing `from`. Tries 16 headings around the target.
std::optional<Vec2> approach_point(const WorldState& world, Vec2 target, Vec2 from, double distance);

}  // namespace rico
