#include "rico/grid_io.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace rico {

void write_grid(std::ostream& os, const TextGrid& grid) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << grid.rows << ' ' << grid.cols << ' ' << grid.pitch << ' ' << grid.units << '\n';
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      if (c) out << ' ';
      out << grid.values[static_cast<std::size_t>(r) * grid.cols + c];
    }
    out << '\n';
  }
  os << out.str();
}

TextGrid read_grid(std::istream& is) {
  TextGrid grid;
  std::string header;
  if (!std::getline(is, header)) throw GridFormatError("missing header line");
  std::istringstream hs(header);
  if (!(hs >> grid.rows >> grid.cols >> grid.pitch >> grid.units))
    throw GridFormatError("header must be '<rows> <cols> <pitch> <units>'");
  if (grid.rows <= 0 || grid.cols <= 0) throw GridFormatError("grid dimensions must be positive");
  if (!std::isfinite(grid.pitch) || grid.pitch <= 0.0) throw GridFormatError("pitch must be positive");
  grid.values.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
  std::string line;
  for (int r = 0; r < grid.rows; ++r) {
    if (!std::getline(is, line)) throw GridFormatError("expected " + std::to_string(grid.rows) + " rows, got " + std::to_string(r));
    std::istringstream ls(line);
    for (int c = 0; c < grid.cols; ++c) {
      double v = 0.0;
      if (!(ls >> v)) throw GridFormatError("row " + std::to_string(r) + ": expected " + std::to_string(grid.cols) + " values");
      grid.values.push_back(v);
    }
    std::string extra;
    if (ls >> extra) throw GridFormatError("row " + std::to_string(r) + ": trailing data");
  }
  return grid;
}

TextGrid to_text_grid(const PressureGrid& grid) {
  return {grid.rows, grid.cols, grid.pitch, "N", grid.forces};
}

TextGrid to_text_grid(const ThermalFrame& frame) {
  return {frame.rows, frame.cols, frame.pixel_pitch(), "degC", frame.pixels};
}

PressureGrid pressure_from_text(const TextGrid& grid) {
  if (grid.units != "N") throw GridFormatError("pressure grid units must be N, got " + grid.units);
  PressureGrid out = PressureGrid::zeros(grid.rows, grid.cols, grid.pitch);
  for (double v : grid.values)
    if (!(v >= 0.0)) throw GridFormatError("negative or non-finite force");
  out.forces = grid.values;
  return out;
}

ThermalFrame thermal_from_text(const TextGrid& grid) {
  if (grid.units != "degC") throw GridFormatError("thermal grid units must be degC, got " + grid.units);
  ThermalFrame out;
  out.rows = grid.rows;
  out.cols = grid.cols;
  out.hfov = grid.pitch * grid.cols;
  out.pixels = grid.values;
  return out;
}

}  // namespace rico
