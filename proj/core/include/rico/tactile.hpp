#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rico/world.hpp"

namespace rico {

inline constexpr double kStandardGravity = 9.80665;

/// Row-major tile forces in newtons.
struct PressureGrid {
  int rows = 15;
  int cols = 14;
  double pitch = 0.02;
  double timestamp = 0.0;
  std::vector<double> forces;

  static PressureGrid zeros(int rows, int cols, double pitch);

  double at(int row, int col) const { return forces[static_cast<std::size_t>(row) * cols + col]; }
  double& at(int row, int col) { return forces[static_cast<std::size_t>(row) * cols + col]; }
  double total() const;

  friend bool operator==(const PressureGrid&, const PressureGrid&) = default;
};

enum class ObjectClass { Mug, Plate, Box, Unknown };

const char* to_string(ObjectClass c);
std::optional<ObjectClass> object_class_from_string(std::string_view s);

struct TableReading {
  bool present = false;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  Vec2 centroid_meters;  // table frame
  double weight = 0.0;   // kg
  ObjectClass object_class = ObjectClass::Unknown;
  bool edge_flag = false;
  double total_force = 0.0;
  double class_iou = 0.0;

  friend bool operator==(const TableReading&, const TableReading&) = default;
};

struct TactileAnalysisConfig {
  double presence_threshold = 0.05;  // N, on the total
  double active_threshold = 0.01;    // N, per tile
  double min_iou = 0.6;
};

/// Each object on the table spreads mass * g uniformly over the tiles whose
/// centers lie inside its footprint disc (the nearest tile if none does).
PressureGrid read_tactile(const WorldState& world);

/// Footprint of a single object, the building block of read_tactile.
PressureGrid object_pressure(const TableFrame& table, const SimObject& obj);

/// Active-tile mask for a class template anchored at (row, col) of its
/// top-left cell, clipped to the grid.
std::vector<char> template_mask(ObjectClass cls, int rows, int cols, int top, int left, bool rotated = false);

TableReading analyze_table(const PressureGrid& grid, const TactileAnalysisConfig& cfg = {});

struct PayloadExpectation {
  ObjectClass object_class = ObjectClass::Mug;
  double weight_kg = 0.0;
  double tolerance_kg = 0.05;
};

enum class PayloadIssue { EdgeViolation, WeightMismatch, ClassMismatch, Absent };

const char* to_string(PayloadIssue i);

struct VerificationResult {
  std::vector<PayloadIssue> issues;  // sorted, unique

  bool ok() const { return issues.empty(); }
  bool has(PayloadIssue i) const;
  friend bool operator==(const VerificationResult&, const VerificationResult&) = default;
};

/// Throws std::invalid_argument when tolerance_kg <= 0.
VerificationResult verify_payload(const TableReading& reading, const PayloadExpectation& expected);

}  // namespace rico
