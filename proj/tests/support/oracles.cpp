#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace oracle {

using rico::Rect;
using rico::Vec2;

rico::Pose integrate(rico::Pose p, double v, double w, double dt, int steps, int substeps) {
  const double h = dt / substeps;
  double x = p.x, y = p.y, th = p.theta;
  for (int i = 0; i < steps * substeps; ++i) {
    x += v * std::cos(th) * h;
    y += v * std::sin(th) * h;
    th += w * h;
  }
  th = std::remainder(th, 2.0 * std::numbers::pi);
  if (th <= -std::numbers::pi) th += 2.0 * std::numbers::pi;
  return {x, y, th};
}

std::optional<double> grid_shortest_path(const rico::OccupancyGrid& grid, Vec2 from, Vec2 to) {
  auto nearest_free = [&](Vec2 p) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int y = 0; y < grid.height; ++y)
      for (int x = 0; x < grid.width; ++x)
        if (grid.is_free(x, y)) {
          const double d = rico::distance(grid.center(x, y), p);
          if (d < best_d) best_d = d, best = y * grid.width + x;
        }
    return best;
  };
  const int s = nearest_free(from);
  const int g = nearest_free(to);
  if (s < 0 || g < 0) return std::nullopt;

  const std::size_t n = static_cast<std::size_t>(grid.width) * grid.height;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  dist[s] = 0.0;
  // O(n^2) selection: no heap, nothing clever.
  for (;;) {
    int u = -1;
    for (std::size_t i = 0; i < n; ++i)
      if (!done[i] && std::isfinite(dist[i]) && (u < 0 || dist[i] < dist[u])) u = static_cast<int>(i);
    if (u < 0) break;
    if (u == g) return dist[g];
    done[u] = 1;
    const int ux = u % grid.width, uy = u / grid.width;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy) continue;
        if (!grid.is_free(ux + dx, uy + dy)) continue;
        if (dx && dy && (!grid.is_free(ux + dx, uy) || !grid.is_free(ux, uy + dy))) continue;
        const int v = (uy + dy) * grid.width + ux + dx;
        const double c = dist[u] + grid.resolution * std::sqrt(double(dx * dx + dy * dy));
        if (c < dist[v]) dist[v] = c;
      }
  }
  return std::nullopt;
}

namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

void edges(const Rect& r, Vec2 out[4][2]) {
  const Vec2 c[4] = {r.min, {r.max.x, r.min.y}, r.max, {r.min.x, r.max.y}};
  for (int i = 0; i < 4; ++i) {
    out[i][0] = c[i];
    out[i][1] = c[(i + 1) % 4];
  }
}

}  // namespace

bool segment_touches_rect(Vec2 a, Vec2 b, const Rect& r) {
  if (r.contains(a) || r.contains(b)) return true;
  Vec2 e[4][2];
  edges(r, e);
  for (auto& edge : e)
    if (segments_intersect(a, b, edge[0], edge[1])) return true;
  return false;
}

std::vector<char> disc_pixels(const rico::ThermalFrame& f, double az, double el, double radius, double d) {
  const double alpha = std::asin(radius / d);
  const double pitch = f.hfov / f.cols;
  std::vector<char> out(static_cast<std::size_t>(f.rows) * f.cols, 0);
  for (int row = 0; row < f.rows; ++row)
    for (int col = 0; col < f.cols; ++col) {
      // Pixel (row, col) spans azimuth [left - (col+1) p, left - col p] and
      // elevation [top - (row+1) p, top - row p].
      const double az_max = 0.5 * f.hfov - col * pitch;
      const double az_min = az_max - pitch;
      const double el_max = 0.5 * pitch * f.rows - row * pitch;
      const double el_min = el_max - pitch;
      const double px = std::clamp(az, az_min, az_max);
      const double py = std::clamp(el, el_min, el_max);
      out[static_cast<std::size_t>(row) * f.cols + col] = std::hypot(px - az, py - el) <= alpha;
    }
  return out;
}

std::vector<Component> label_components(const std::vector<double>& pixels, int rows, int cols, double threshold) {
  const int n = rows * cols;
  std::vector<int> label(n, -1);
  for (int i = 0; i < n; ++i)
    if (pixels[i] >= threshold) label[i] = i;
  // Propagate the minimum label to 4-neighbours until nothing changes.
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (label[i] < 0) continue;
      const int r = i / cols, c = i % cols;
      const int nb[4] = {r > 0 ? i - cols : -1, r + 1 < rows ? i + cols : -1, c > 0 ? i - 1 : -1,
                         c + 1 < cols ? i + 1 : -1};
      for (int j : nb)
        if (j >= 0 && label[j] >= 0 && label[j] < label[i]) label[i] = label[j], changed = true;
    }
  }
  std::vector<Component> out;
  for (int root = 0; root < n; ++root) {
    if (label[root] != root) continue;
    Component c;
    c.first_pixel = root;
    c.peak = -std::numeric_limits<double>::infinity();
    double sr = 0, sc = 0;
    for (int i = 0; i < n; ++i)
      if (label[i] == root) {
        ++c.area;
        sr += i / cols;
        sc += i % cols;
        c.peak = std::max(c.peak, pixels[i]);
      }
    c.centroid_row = sr / c.area;
    c.centroid_col = sc / c.area;
    out.push_back(c);
  }
  return out;
}

TableSums table_sums(const rico::PressureGrid& grid, double active_threshold) {
  TableSums s;
  double mr = 0, mc = 0;
  for (int r = 0; r < grid.rows; ++r)
    for (int c = 0; c < grid.cols; ++c) {
      const double f = grid.forces[static_cast<std::size_t>(r * grid.cols + c)];
      s.total += f;
      mr += f * r;
      mc += f * c;
      if (f > active_threshold && (r == 0 || c == 0 || r == grid.rows - 1 || c == grid.cols - 1)) s.edge = true;
    }
  if (s.total > 0) {
    s.centroid_row = mr / s.total;
    s.centroid_col = mc / s.total;
  }
  s.weight = s.total / 9.80665;
  return s;
}

namespace {

// Parameter u along p + u (q - p) where it crosses segment [a, b].
std::optional<double> cross_param(Vec2 p, Vec2 q, Vec2 a, Vec2 b) {
  const Vec2 r = q - p, s = b - a;
  const double denom = r.cross(s);
  if (denom == 0.0) return std::nullopt;  // parallel: the perpendicular edges decide
  const double u = (a - p).cross(s) / denom;
  const double t = (a - p).cross(r) / denom;
  if (u < 0.0 || u > 1.0 || t < 0.0 || t > 1.0) return std::nullopt;
  return u;
}

}  // namespace

double beam_range(const rico::WorldState& world, double angle, double max_range, double person_radius) {
  const Vec2 p = world.robot.position();
  const Vec2 q = p + Vec2{std::cos(angle), std::sin(angle)} * max_range;
  double best = 1.0;
  for (const Rect& r : world.obstacles) {
    Vec2 e[4][2];
    edges(r, e);
    for (auto& edge : e)
      if (auto u = cross_param(p, q, edge[0], edge[1]); u && *u > 0.0) best = std::min(best, *u);
  }
  auto disc = [&](Vec2 c, double rad) {
    // |p + u (q - p) - c| = rad, smaller root, origin outside the disc.
    const Vec2 d = q - p, m = p - c;
    const double A = d.dot(d), B = 2 * m.dot(d), C = m.dot(m) - rad * rad;
    if (C < 0) return;
    const double disc = B * B - 4 * A * C;
    if (disc < 0) return;
    const double u = (-B - std::sqrt(disc)) / (2 * A);
    if (u > 0.0 && u <= 1.0) best = std::min(best, u);
  };
  for (const auto& o : world.objects)
    if (!o.on_table()) disc(o.position, o.footprint_radius);
  for (const auto& per : world.persons) disc(per.position, person_radius);
  return best * max_range;
}

// ---- tasker model --------------------------------------------------------------

rico::ScheduleDecision TaskerModel::harmonise() {
  using rico::TaskState;
  rico::ScheduleDecision d;
  std::vector<ReplayTask*> cands;
  ReplayTask* exec = nullptr;
  for (auto& t : tasks_) {
    if (t.state == TaskState::Executing) exec = &t;
    if (t.state == TaskState::Waiting || t.state == TaskState::Suspended) cands.push_back(&t);
  }
  std::sort(cands.begin(), cands.end(), [](const ReplayTask* a, const ReplayTask* b) {
    if (a->priority != b->priority) return a->priority > b->priority;
    if (a->submitted_at != b->submitted_at) return a->submitted_at < b->submitted_at;
    return a->id < b->id;
  });
  if (!cands.empty() && (!exec || cands[0]->priority > exec->priority)) {
    if (exec) {
      exec->state = TaskState::Suspended;
      d.actions.push_back({rico::ActionKind::Suspend, {exec->id}});
    }
    ReplayTask* c = cands[0];
    d.actions.push_back({c->state == TaskState::Suspended ? rico::ActionKind::Resume : rico::ActionKind::Start, {c->id}});
    c->state = TaskState::Executing;
    exec = c;
  }
  if (exec) d.active = rico::TaskId{exec->id};
  return d;
}

ReplayStep TaskerModel::apply(const Op& op) {
  using rico::TaskState;
  ReplayStep step;
  auto find = [&](std::uint64_t id) -> ReplayTask* {
    for (auto& t : tasks_)
      if (t.id == id) return &t;
    return nullptr;
  };
  switch (op.kind) {
    case Op::Clock: clock_ = op.clock; break;
    case Op::Submit: tasks_.push_back({tasks_.size() + 1, op.priority, clock_, TaskState::Waiting}); break;
    case Op::Harmonise: step.decision = harmonise(); break;
    case Op::Complete: {
      ReplayTask* t = find(op.target);
      if (!t || t->state != TaskState::Executing) {
        step.error = true;
        break;
      }
      t->state = TaskState::Finished;
      step.decision = harmonise();
      break;
    }
    case Op::Terminate: {
      ReplayTask* t = find(op.target);
      if (!t || t->state == TaskState::Finished || t->state == TaskState::Terminated) {
        step.error = true;
        break;
      }
      const bool was_exec = t->state == TaskState::Executing;
      t->state = TaskState::Terminated;
      if (was_exec) {
        step.decision = harmonise();
      } else {
        for (auto& x : tasks_)
          if (x.state == TaskState::Executing) step.decision.active = rico::TaskId{x.id};
      }
      break;
    }
  }
  step.tasks = tasks_;
  return step;
}

std::vector<Op> random_ops(std::mt19937_64& rng, int length) {
  std::vector<Op> ops;
  std::uint64_t submitted = 0;
  double clock = 0.0;
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  for (int i = 0; i < length; ++i) {
    Op op;
    const int r = pick(100);
    if (r < 30) {
      op.kind = Op::Submit;
      op.priority = pick(6) * 10 - 10;  // few distinct values, so ties are common
      ++submitted;
    } else if (r < 55) {
      op.kind = Op::Harmonise;
    } else if (r < 75) {
      op.kind = Op::Complete;
      op.target = submitted ? 1 + rng() % (submitted + 1) : 1;  // sometimes an unknown id
    } else if (r < 88) {
      op.kind = Op::Terminate;
      op.target = submitted ? 1 + rng() % (submitted + 1) : 1;
    } else {
      op.kind = Op::Clock;
      if (pick(3)) clock += 0.1 * pick(5);
      op.clock = clock;
    }
    ops.push_back(op);
  }
  return ops;
}

std::optional<std::string> replay_mismatch(const std::vector<Op>& ops) {
  using rico::TaskState;
  rico::Tasker tasker;
  TaskerModel model;
  std::size_t trace_seen = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Op& op = ops[i];
    const std::string at = "op " + std::to_string(i) + ": ";
    const ReplayStep want = model.apply(op);
    rico::ScheduleDecision got;
    bool threw = false;
    try {
      switch (op.kind) {
        case Op::Clock: tasker.set_clock(op.clock); break;
        case Op::Submit: tasker.submit("t", op.priority); break;
        case Op::Harmonise: got = tasker.harmonise(); break;
        case Op::Complete: got = tasker.complete({op.target}); break;
        case Op::Terminate: got = tasker.terminate({op.target}); break;
      }
    } catch (const rico::TaskerError&) {
      threw = true;
    }
    if (threw != want.error) return at + (threw ? "unexpected rejection" : "missing rejection");
    if (!threw && got != want.decision) return at + "decision differs from replay";

    const auto recs = tasker.tasks();
    if (recs.size() != want.tasks.size()) return at + "task count differs";
    int executing = 0;
    std::int64_t exec_priority = 0;
    for (std::size_t k = 0; k < recs.size(); ++k) {
      if (recs[k].id.value != want.tasks[k].id || recs[k].state != want.tasks[k].state)
        return at + "state of task " + std::to_string(want.tasks[k].id) + " differs from replay";
      if (recs[k].state == TaskState::Executing) ++executing, exec_priority = recs[k].priority;
    }
    if (executing > 1) return at + "more than one task executing";
    const bool decided = !threw && (op.kind == Op::Harmonise || op.kind == Op::Complete);
    if (decided) {
      for (const auto& r : recs) {
        const bool pending = r.state == TaskState::Waiting || r.state == TaskState::Suspended;
        if (pending && executing == 0) return at + "idle while a task is pending";
        if (pending && r.priority > exec_priority) return at + "priority dominance violated";
      }
    }
    const auto& trace = tasker.trace();
    for (; trace_seen < trace.size(); ++trace_seen) {
      const auto& t = trace[trace_seen];
      if (t.before && !rico::legal_transition(*t.before, t.after)) return at + "illegal transition in trace";
    }
  }
  return std::nullopt;
}

}  // namespace oracle
