#include "rico/tactile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rico {

namespace {

struct Offset {
  int dr;
  int dc;
};

std::vector<Offset> disc_template(int diameter) {
  const double radius = 0.5 * diameter;
  const double center = 0.5 * (diameter - 1);
  std::vector<Offset> out;
  for (int r = 0; r < diameter; ++r) {
    for (int c = 0; c < diameter; ++c) {
      if (std::hypot(r - center, c - center) <= radius) out.push_back({r, c});
    }
  }
  return out;
}

std::vector<Offset> rect_template(int h, int w) {
  std::vector<Offset> out;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out.push_back({r, c});
  return out;
}

const std::vector<Offset>& offsets(ObjectClass cls, bool rotated) {
  static const std::vector<Offset> mug = disc_template(3);
  static const std::vector<Offset> plate = disc_template(7);
  static const std::vector<Offset> box = rect_template(4, 6);
  static const std::vector<Offset> box_rot = rect_template(6, 4);
  static const std::vector<Offset> none;
  switch (cls) {
    case ObjectClass::Mug: return mug;
    case ObjectClass::Plate: return plate;
    case ObjectClass::Box: return rotated ? box_rot : box;
    case ObjectClass::Unknown: return none;
  }
  return none;
}

double iou(const std::vector<char>& a, const std::vector<char>& b) {
  int inter = 0;
  int uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] && b[i]);
    uni += (a[i] || b[i]);
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

}  // namespace

PressureGrid PressureGrid::zeros(int rows, int cols, double pitch) {
  PressureGrid g;
  g.rows = rows;
  g.cols = cols;
  g.pitch = pitch;
  g.forces.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  return g;
}

double PressureGrid::total() const {
  double sum = 0.0;
  for (double f : forces) sum += f;
  return sum;
}

const char* to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::Mug: return "mug";
    case ObjectClass::Plate: return "plate";
    case ObjectClass::Box: return "box";
    case ObjectClass::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<ObjectClass> object_class_from_string(std::string_view s) {
  if (s == "mug") return ObjectClass::Mug;
  if (s == "plate") return ObjectClass::Plate;
  if (s == "box") return ObjectClass::Box;
  if (s == "unknown") return ObjectClass::Unknown;
  return std::nullopt;
}

const char* to_string(PayloadIssue i) {
  switch (i) {
    case PayloadIssue::EdgeViolation: return "edge_violation";
    case PayloadIssue::WeightMismatch: return "weight_mismatch";
    case PayloadIssue::ClassMismatch: return "class_mismatch";
    case PayloadIssue::Absent: return "absent";
  }
  return "absent";
}

PressureGrid object_pressure(const TableFrame& table, const SimObject& obj) {
  PressureGrid grid = PressureGrid::zeros(table.rows, table.cols, table.pitch);
  if (!obj.table_position) return grid;
  const Vec2 p = *obj.table_position;
  std::vector<std::size_t> covered;
  for (int r = 0; r < table.rows; ++r) {
    for (int c = 0; c < table.cols; ++c) {
      if (distance(table.tile_center(r, c), p) <= obj.footprint_radius + 1e-12)
        covered.push_back(static_cast<std::size_t>(r) * table.cols + c);
    }
  }
  if (covered.empty()) {
    const int c = std::clamp(static_cast<int>(std::floor(p.x / table.pitch)), 0, table.cols - 1);
    const int r = std::clamp(static_cast<int>(std::floor(p.y / table.pitch)), 0, table.rows - 1);
    covered.push_back(static_cast<std::size_t>(r) * table.cols + c);
  }
  const double share = obj.mass * kStandardGravity / static_cast<double>(covered.size());
  for (std::size_t i : covered) grid.forces[i] = share;
  return grid;
}

PressureGrid read_tactile(const WorldState& world) {
  PressureGrid grid = PressureGrid::zeros(world.table.rows, world.table.cols, world.table.pitch);
  grid.timestamp = world.clock;
  for (const SimObject& obj : world.objects) {
    if (!obj.on_table()) continue;
    const PressureGrid solo = object_pressure(world.table, obj);
    for (std::size_t i = 0; i < grid.forces.size(); ++i) grid.forces[i] += solo.forces[i];
  }
  return grid;
}

std::vector<char> template_mask(ObjectClass cls, int rows, int cols, int top, int left, bool rotated) {
  std::vector<char> mask(static_cast<std::size_t>(rows) * cols, 0);
  for (const Offset& o : offsets(cls, rotated)) {
    const int r = top + o.dr;
    const int c = left + o.dc;
    if (r < 0 || c < 0 || r >= rows || c >= cols) continue;
    mask[static_cast<std::size_t>(r) * cols + c] = 1;
  }
  return mask;
}

TableReading analyze_table(const PressureGrid& grid, const TactileAnalysisConfig& cfg) {
  TableReading out;
  double total = 0.0;
  double sum_r = 0.0;
  double sum_c = 0.0;
  std::vector<char> active(grid.forces.size(), 0);
  int n_active = 0;
  double mask_r = 0.0;
  double mask_c = 0.0;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const double f = grid.at(r, c);
      total += f;
      sum_r += f * r;
      sum_c += f * c;
      if (f > cfg.active_threshold) {
        active[static_cast<std::size_t>(r) * grid.cols + c] = 1;
        ++n_active;
        mask_r += r;
        mask_c += c;
        if (r == 0 || c == 0 || r == grid.rows - 1 || c == grid.cols - 1) out.edge_flag = true;
      }
    }
  }
  if (!(total > cfg.presence_threshold)) return TableReading{};

  out.present = true;
  out.total_force = total;
  out.weight = total / kStandardGravity;
  out.centroid_row = sum_r / total;
  out.centroid_col = sum_c / total;
  out.centroid_meters = {(out.centroid_col + 0.5) * grid.pitch, (out.centroid_row + 0.5) * grid.pitch};

  if (n_active == 0) return out;
  mask_r /= n_active;
  mask_c /= n_active;

  double best = 0.0;
  ObjectClass best_cls = ObjectClass::Unknown;
  for (ObjectClass cls : {ObjectClass::Mug, ObjectClass::Plate, ObjectClass::Box}) {
    for (bool rotated : {false, true}) {
      if (rotated && cls != ObjectClass::Box) continue;
      const auto& offs = offsets(cls, rotated);
      double tr = 0.0;
      double tc = 0.0;
      for (const Offset& o : offs) {
        tr += o.dr;
        tc += o.dc;
      }
      tr /= static_cast<double>(offs.size());
      tc /= static_cast<double>(offs.size());
      const int top0 = static_cast<int>(std::round(mask_r - tr));
      const int left0 = static_cast<int>(std::round(mask_c - tc));
      for (int dt = -2; dt <= 2; ++dt) {
        for (int dl = -2; dl <= 2; ++dl) {
          const double score = iou(active, template_mask(cls, grid.rows, grid.cols, top0 + dt, left0 + dl, rotated));
          if (score > best) {
            best = score;
            best_cls = cls;
          }
        }
      }
    }
  }
  out.class_iou = best;
  out.object_class = best >= cfg.min_iou ? best_cls : ObjectClass::Unknown;
  return out;
}

bool VerificationResult::has(PayloadIssue i) const {
  return std::find(issues.begin(), issues.end(), i) != issues.end();
}

VerificationResult verify_payload(const TableReading& reading, const PayloadExpectation& expected) {
  if (!(expected.tolerance_kg > 0.0)) throw std::invalid_argument("tolerance_kg must be > 0");
  VerificationResult res;
  if (!reading.present) {
    res.issues.push_back(PayloadIssue::Absent);
    return res;
  }
  if (reading.edge_flag) res.issues.push_back(PayloadIssue::EdgeViolation);
  if (std::abs(reading.weight - expected.weight_kg) > expected.tolerance_kg) res.issues.push_back(PayloadIssue::WeightMismatch);
  if (reading.object_class != expected.object_class) res.issues.push_back(PayloadIssue::ClassMismatch);
  return res;
}

}  // namespace rico
