#include "rico/microphone.hpp"

#include <algorithm>
#include <cmath>

namespace rico {

double omni_score(double distance, const MicrophoneModel& model) {
  return std::clamp(1.0 - distance / model.omni_range, 0.0, 1.0);
}

double directional_score(double distance, double off_axis, const MicrophoneModel& model) {
  const double gain = 0.5 * (1.0 + std::cos(off_axis));
  return std::clamp(1.0 - distance / model.directional_range, 0.0, 1.0) * gain;
}

MicSample capture_speech(const WorldState& world, const Person& speaker, std::string text,
                         const MicrophoneModel& model) {
  MicSample s;
  const Vec2 rel = speaker.position - world.robot.position();
  const double d = rel.norm();
  const double bearing = d > 0.0 ? normalize_angle(std::atan2(rel.y, rel.x) - world.robot.theta) : 0.0;
  const double off_axis = std::abs(normalize_angle(bearing - world.head.pan));
  s.speaker_distance = d;
  s.speaker_bearing = bearing;
  s.omni_score = omni_score(d, model);
  s.dir_score = directional_score(d, off_axis, model);
  s.transcript = std::move(text);
  return s;
}

}  // namespace rico
