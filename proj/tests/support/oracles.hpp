#pragma once

// Reference implementations used to check the library. Each one is written
// from the model description with a different algorithm than the code under
// test, favouring obviousness over speed.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rico/planner.hpp"
#include "rico/tactile.hpp"
#include "rico/tasker.hpp"
#include "rico/thermal.hpp"
#include "rico/world.hpp"

namespace oracle {

// Unicycle integration with `substeps` Euler steps per dt.
rico::Pose integrate(rico::Pose p, double v, double w, double dt, int steps, int substeps);

// Dijkstra over the 8-connected free cells of `grid`, with the same
// no-corner-cutting rule for diagonals. Returns the cost from the free cell
// nearest `from` to the free cell nearest `to`, or nullopt.
std::optional<double> grid_shortest_path(const rico::OccupancyGrid& grid, rico::Vec2 from, rico::Vec2 to);

// Closed segment against closed rectangle via its four edges plus containment.
bool segment_touches_rect(rico::Vec2 a, rico::Vec2 b, const rico::Rect& r);

// Pixels whose angular cell touches the angular disc of a sphere of radius r
// at azimuth az / elevation el (radians, camera frame) and distance d.
std::vector<char> disc_pixels(const rico::ThermalFrame& geometry, double az, double el, double radius, double d);

struct Component {
  int first_pixel = 0;  // row-major index of the first member
  int area = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double peak = 0.0;
};

// Connected components by iterated label propagation until a fixed point.
std::vector<Component> label_components(const std::vector<double>& pixels, int rows, int cols, double threshold);

struct TableSums {
  double total = 0.0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  double weight = 0.0;
  bool edge = false;
};

TableSums table_sums(const rico::PressureGrid& grid, double active_threshold);

// Distance along the ray to the first obstacle edge, disc or max_range, by
// intersecting the beam segment with every rectangle edge.
double beam_range(const rico::WorldState& world, double angle, double max_range, double person_radius);

// ---- tasker replay -------------------------------------------------------------

struct Op {
  enum Kind { Submit, Harmonise, Complete, Terminate, Clock } kind = Harmonise;
  std::int64_t priority = 0;  // Submit
  std::uint64_t target = 0;   // Complete / Terminate (task id)
  double clock = 0.0;         // Clock
};

struct ReplayTask {
  std::uint64_t id = 0;
  std::int64_t priority = 0;
  double submitted_at = 0.0;
  rico::TaskState state = rico::TaskState::Waiting;
};

struct ReplayStep {
  bool error = false;  // the operation must be rejected
  rico::ScheduleDecision decision;
  std::vector<ReplayTask> tasks;  // after the operation
};

// Straightforward model of the harmoniser: every decision is recomputed by
// sorting all candidates.
class TaskerModel {
 public:
  ReplayStep apply(const Op& op);
  const std::vector<ReplayTask>& tasks() const { return tasks_; }

 private:
  rico::ScheduleDecision harmonise();
  std::vector<ReplayTask> tasks_;
  double clock_ = 0.0;
};

// A random operation sequence that exercises every operation, including
// illegal ones.
std::vector<Op> random_ops(std::mt19937_64& rng, int length);

// Drives a real Tasker and the model side by side. Returns a description of
// the first disagreement or property violation (single executor, priority
// dominance, legal transitions, identical decisions), or nullopt.
std::optional<std::string> replay_mismatch(const std::vector<Op>& ops);

}  // namespace oracle
