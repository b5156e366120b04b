#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rico/tactile.hpp"
#include "rico/thermal.hpp"

namespace rico {

class GridFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Plain-text grid:
///
///   <rows> <cols> <pitch> <units>
///   v(0,0) v(0,1) ... v(0,cols-1)
///   ...
///
/// Values are written with 17 significant digits so a read after a write is
/// exact. Units are "N" for pressure grids (pitch in meters) and "degC" for
/// thermal frames (pitch in radians per pixel).
struct TextGrid {
  int rows = 0;
  int cols = 0;
  double pitch = 0.0;
  std::string units;
  std::vector<double> values;
};

void write_grid(std::ostream& os, const TextGrid& grid);
TextGrid read_grid(std::istream& is);

TextGrid to_text_grid(const PressureGrid& grid);
TextGrid to_text_grid(const ThermalFrame& frame);
PressureGrid pressure_from_text(const TextGrid& grid);
ThermalFrame thermal_from_text(const TextGrid& grid);

}  // namespace rico
