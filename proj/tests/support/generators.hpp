#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "rico/protocol.hpp"
#include "rico/tactile.hpp"
#include "rico/thermal.hpp"
#include "rico/world.hpp"

namespace gen {

double uniform(std::mt19937_64& rng, double lo, double hi);
int integer(std::mt19937_64& rng, int lo, int hi);  // inclusive

// Rectangles, floor objects and persons around a robot that is clear of all
// of them.
rico::WorldState lidar_world(std::mt19937_64& rng);

// Sparse random forces, sometimes touching the border, sometimes empty.
rico::PressureGrid pressure_grid(std::mt19937_64& rng);

// Ambient background with random blobs and speckles around `threshold`.
rico::ThermalFrame thermal_frame(std::mt19937_64& rng, double threshold);

rico::TelemetryFrame telemetry_frame(std::mt19937_64& rng);

// One hostile client message: random bytes, broken JSON, or a valid message
// with mutated fields.
std::string fuzz_message(std::mt19937_64& rng);

// Well-formed UTF-8 (no overlongs, surrogates or code points past U+10FFFF).
bool valid_utf8(std::string_view s);

}  // namespace gen
