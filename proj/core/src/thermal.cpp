#include "rico/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rico {

namespace {

double interval_gap(double v, double lo, double hi) {
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

}  // namespace

ThermalFrame render_thermal(const WorldState& world, const ThermalCameraConfig& cfg) {
  ThermalFrame frame;
  frame.cols = cfg.cols;
  frame.rows = cfg.rows;
  frame.hfov = cfg.hfov;
  frame.max_range = cfg.max_range;
  frame.timestamp = world.clock;
  frame.head_pan = world.head.pan;
  frame.pixels.assign(static_cast<std::size_t>(cfg.cols) * cfg.rows, world.ambient_temperature);

  const Vec2 eye = world.robot.position();
  const double heading = world.robot.theta + world.head.pan;
  const double pitch = frame.pixel_pitch();
  const double half_h = 0.5 * frame.hfov;
  const double half_v = 0.5 * frame.vfov();
  std::vector<double> depth(frame.pixels.size(), std::numeric_limits<double>::infinity());

  for (const SimObject& obj : world.objects) {
    if (obj.on_table()) continue;
    const Vec2 rel = obj.position - eye;
    const double d = rel.norm();
    if (d > cfg.max_range || d <= obj.footprint_radius) continue;
    bool occluded = false;
    for (const Rect& r : world.obstacles) {
      if (segment_hits_interior(eye, obj.position, r)) {
        occluded = true;
        break;
      }
    }
    if (occluded) continue;

    const double az = normalize_angle(std::atan2(rel.y, rel.x) - heading);
    const double el = -world.head.tilt;
    const double alpha = std::asin(obj.footprint_radius / d);
    if (std::abs(az) > half_h + alpha || std::abs(el) > half_v + alpha) continue;

    for (int row = 0; row < frame.rows; ++row) {
      const double el_hi = half_v - row * pitch;
      const double el_lo = el_hi - pitch;
      const double gy = interval_gap(el, el_lo, el_hi);
      if (gy > alpha) continue;
      for (int col = 0; col < frame.cols; ++col) {
        const double az_hi = half_h - col * pitch;
        const double az_lo = az_hi - pitch;
        const double gx = interval_gap(az, az_lo, az_hi);
        if (std::hypot(gx, gy) > alpha) continue;
        const std::size_t i = static_cast<std::size_t>(row) * frame.cols + col;
        if (d < depth[i]) {
          depth[i] = d;
          frame.pixels[i] = obj.surface_temperature;
        }
      }
    }
  }
  return frame;
}

double column_bearing(const ThermalFrame& frame, double col) {
  return normalize_angle(frame.head_pan + 0.5 * frame.hfov - (col + 0.5) * frame.pixel_pitch());
}

std::vector<HotspotDetection> detect_hotspots(const ThermalFrame& frame, double threshold,
                                              double nominal_object_radius) {
  std::vector<HotspotDetection> out;
  std::vector<char> seen(frame.pixels.size(), 0);
  std::vector<int> stack;
  for (int row = 0; row < frame.rows; ++row) {
    for (int col = 0; col < frame.cols; ++col) {
      const int start = row * frame.cols + col;
      if (seen[start] || frame.pixels[start] < threshold) continue;
      seen[start] = 1;
      stack.assign(1, start);
      double sum_r = 0.0;
      double sum_c = 0.0;
      double peak = -std::numeric_limits<double>::infinity();
      int area = 0;
      int min_c = col;
      int max_c = col;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int r = idx / frame.cols;
        const int c = idx % frame.cols;
        sum_r += r;
        sum_c += c;
        peak = std::max(peak, frame.pixels[idx]);
        ++area;
        min_c = std::min(min_c, c);
        max_c = std::max(max_c, c);
        const int nr[4] = {r - 1, r + 1, r, r};
        const int nc[4] = {c, c, c - 1, c + 1};
        for (int k = 0; k < 4; ++k) {
          if (nr[k] < 0 || nr[k] >= frame.rows || nc[k] < 0 || nc[k] >= frame.cols) continue;
          const int ni = nr[k] * frame.cols + nc[k];
          if (seen[ni] || frame.pixels[ni] < threshold) continue;
          seen[ni] = 1;
          stack.push_back(ni);
        }
      }
      HotspotDetection det;
      det.area = area;
      det.centroid_row = sum_r / area;
      det.centroid_col = sum_c / area;
      det.peak_temperature = peak;
      det.bearing = column_bearing(frame, det.centroid_col);
      // Coarse: apparent width against the nominal object size.
      const double width = (max_c - min_c + 1) * frame.pixel_pitch();
      det.estimated_range = std::min(frame.max_range, nominal_object_radius / std::sin(0.5 * width));
      out.push_back(det);
    }
  }
  return out;
}

}  // namespace rico
