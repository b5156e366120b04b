#pragma once

#include <vector>

#include "rico/world.hpp"

namespace rico {

struct ThermalCameraConfig {
  int cols = 32;
  int rows = 24;
  double hfov = 0.995;  // rad, ~57 deg
  double max_range = 5.0;
  // Object radius assumed when turning apparent width into range.
  double nominal_object_radius = 0.04;
};

/// Row-major temperature image. Column 0 looks left (positive azimuth),
/// row 0 looks up.
struct ThermalFrame {
  int cols = 32;
  int rows = 24;
  double hfov = 0.995;
  double max_range = 5.0;
  double timestamp = 0.0;
  double head_pan = 0.0;
  std::vector<double> pixels;

  double pixel_pitch() const { return hfov / cols; }
  double vfov() const { return pixel_pitch() * rows; }
  double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * cols + col]; }
  double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * cols + col]; }

  friend bool operator==(const ThermalFrame&, const ThermalFrame&) = default;
};

struct HotspotDetection {
  double centroid_col = 0.0;
  double centroid_row = 0.0;
  double peak_temperature = 0.0;
  double bearing = 0.0;  // robot frame
  double estimated_range = 0.0;
  int area = 0;

  friend bool operator==(const HotspotDetection&, const HotspotDetection&) = default;
};

/// Renders the head camera. Objects are spheres at camera height; a pixel
/// takes the temperature of the nearest visible object whose angular disc
/// (half-angle asin(r/d)) touches the pixel's angular cell. Objects behind an
/// obstacle, beyond max_range, or resting on the tactile table are not seen.
ThermalFrame render_thermal(const WorldState& world, const ThermalCameraConfig& cfg = {});

/// 4-connected components of pixels at or above `threshold`, in row-major
/// order of each component's first pixel.
std::vector<HotspotDetection> detect_hotspots(const ThermalFrame& frame, double threshold,
                                              double nominal_object_radius = 0.04);

/// Robot-frame bearing of a fractional pixel column.
double column_bearing(const ThermalFrame& frame, double col);

}  // namespace rico
