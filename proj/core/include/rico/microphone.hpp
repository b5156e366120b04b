#pragma once

#include <string>

#include "rico/world.hpp"

namespace rico {

/// Intelligibility model for the two microphones: linear decay with distance
/// for both, cardioid directivity for the head-mounted one.
struct MicrophoneModel {
  double omni_range = 4.0;         // m, score reaches 0
  double directional_range = 8.0;  // m
};

struct MicSample {
  double omni_score = 0.0;
  double dir_score = 0.0;
  double speaker_bearing = 0.0;  // robot frame
  double speaker_distance = 0.0;
  std::string transcript;
};

MicSample capture_speech(const WorldState& world, const Person& speaker, std::string text,
                         const MicrophoneModel& model = {});

/// Score formulas, exposed for oracles and benchmarks.
double omni_score(double distance, const MicrophoneModel& model = {});
double directional_score(double distance, double off_axis, const MicrophoneModel& model = {});

}  // namespace rico
