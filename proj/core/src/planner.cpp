#include "rico/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace rico {

namespace {

constexpr double kIdentityTolerance = 0.05;
constexpr double kAttachRadius = 0.35;

struct Node {
  double f;
  int index;
  bool operator>(const Node& o) const { return f != o.f ? f > o.f : index > o.index; }
};

int cell_of(double v, double origin, double res) { return static_cast<int>(std::floor((v - origin) / res)); }

// Free cells near p, nearest first, that the robot can reach from p in a
// straight line.
std::vector<int> attach_candidates(const WorldState& world, const OccupancyGrid& grid, Vec2 p) {
  const int cx = cell_of(p.x, grid.origin.x, grid.resolution);
  const int cy = cell_of(p.y, grid.origin.y, grid.resolution);
  const int reach = static_cast<int>(std::ceil(kAttachRadius / grid.resolution)) + 1;
  std::vector<std::pair<double, int>> found;
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const int x = cx + dx;
      const int y = cy + dy;
      if (!grid.is_free(x, y)) continue;
      const double d = distance(grid.center(x, y), p);
      if (d > kAttachRadius) continue;
      found.emplace_back(d, y * grid.width + x);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<int> out;
  for (const auto& [d, idx] : found) {
    if (segment_free(world, p, grid.center(idx % grid.width, idx / grid.width))) out.push_back(idx);
  }
  return out;
}

}  // namespace

OccupancyGrid build_occupancy(const WorldState& world, double resolution, double margin) {
  OccupancyGrid grid;
  grid.origin = world.bounds.min;
  grid.resolution = resolution;
  grid.width = static_cast<int>(std::floor((world.bounds.max.x - world.bounds.min.x) / resolution + 1e-9));
  grid.height = static_cast<int>(std::floor((world.bounds.max.y - world.bounds.min.y) / resolution + 1e-9));
  grid.inflation = world.limits.radius + margin + 0.5 * std::sqrt(2.0) * resolution + 1e-6;
  grid.blocked.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (clearance(world, grid.center(x, y)) < grid.inflation) grid.blocked[static_cast<std::size_t>(y) * grid.width + x] = 1;
    }
  }
  return grid;
}

double path_length(const Path& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
  return len;
}

std::optional<Path> plan_path(const WorldState& world, Vec2 goal, double margin) {
  const Vec2 start = world.robot.position();
  if (!finite(goal.x) || !finite(goal.y)) return std::nullopt;
  if (!world.bounds.contains(goal) || !disc_free(world, goal)) return std::nullopt;
  if (distance(start, goal) <= kIdentityTolerance) return Path{start};
  if (segment_free(world, start, goal, margin)) return Path{start, goal};
  const bool direct_ok = segment_free(world, start, goal);
  if (!world.bounds.contains(start)) return direct_ok ? std::optional<Path>(Path{start, goal}) : std::nullopt;

  const OccupancyGrid grid = build_occupancy(world, 0.1, margin);
  const std::vector<int> starts = attach_candidates(world, grid, start);
  const std::vector<int> goals = attach_candidates(world, grid, goal);
  if (starts.empty() || goals.empty()) return direct_ok ? std::optional<Path>(Path{start, goal}) : std::nullopt;

  const std::size_t n = grid.blocked.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<char> is_goal(n, 0);
  std::vector<char> closed(n, 0);
  for (int idx : goals) is_goal[idx] = 1;

  auto heuristic = [&](int idx) { return distance(grid.center(idx % grid.width, idx / grid.width), goal); };

  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  for (int idx : starts) {
    const double c = distance(start, grid.center(idx % grid.width, idx / grid.width));
    if (c < g[idx]) {
      g[idx] = c;
      open.push({c + heuristic(idx), idx});
    }
  }

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const double diag = std::sqrt(2.0) * grid.resolution;

  int reached = -1;
  double best_total = std::numeric_limits<double>::infinity();
  while (!open.empty()) {
    const Node cur = open.top();
    open.pop();
    if (closed[cur.index]) continue;
    if (cur.f >= best_total) break;
    closed[cur.index] = 1;
    const int cx = cur.index % grid.width;
    const int cy = cur.index / grid.width;
    if (is_goal[cur.index]) {
      const double total = g[cur.index] + distance(grid.center(cx, cy), goal);
      if (total < best_total) {
        best_total = total;
        reached = cur.index;
      }
    }
    for (int k = 0; k < 8; ++k) {
      const int nx = cx + kDx[k];
      const int ny = cy + kDy[k];
      if (!grid.is_free(nx, ny)) continue;
      if (k >= 4 && (!grid.is_free(cx + kDx[k], cy) || !grid.is_free(cx, cy + kDy[k]))) continue;
      const int ni = ny * grid.width + nx;
      if (closed[ni]) continue;
      const double cand = g[cur.index] + (k < 4 ? grid.resolution : diag);
      if (cand < g[ni]) {
        g[ni] = cand;
        parent[ni] = cur.index;
        open.push({cand + heuristic(ni), ni});
      }
    }
  }
  if (reached < 0) return direct_ok ? std::optional<Path>(Path{start, goal}) : std::nullopt;

  Path raw;
  raw.push_back(goal);
  for (int idx = reached; idx >= 0; idx = parent[idx]) raw.push_back(grid.center(idx % grid.width, idx / grid.width));
  raw.push_back(start);
  std::reverse(raw.begin(), raw.end());

  // Greedy shortcutting: from each kept point jump to the farthest point
  // still reachable by a clear straight segment.
  Path smooth{raw.front()};
  std::size_t i = 0;
  while (i + 1 < raw.size()) {
    std::size_t j = raw.size() - 1;
    while (j > i + 1 && !segment_free(world, raw[i], raw[j], margin)) --j;
    smooth.push_back(raw[j]);
    i = j;
  }
  return smooth;
}

}  // namespace rico
