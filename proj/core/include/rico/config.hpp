#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rico/dialogue.hpp"
#include "rico/lidar.hpp"
#include "rico/microphone.hpp"
#include "rico/tactile.hpp"
#include "rico/thermal.hpp"
#include "rico/world.hpp"

namespace rico {

/// Configuration problem. `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct NavigationConfig {
  double speed = 0.5;              // m/s cruise
  double turn_gain = 2.0;
  double max_turn_rate = 1.2;      // rad/s
  double heading_tolerance = 0.35; // rotate in place above this error
  double waypoint_tolerance = 0.08;
  double arrival_tolerance = 0.1;
  double planning_margin = 0.05;   // extra clearance requested from the planner
  int stuck_ticks = 30;            // consecutive collided ticks before replanning
};

struct TaskPriorities {
  std::int64_t fall_response = 100;
  std::int64_t safety_stop = 90;
  std::int64_t hazard_report = 80;
  std::int64_t transport = 50;
  std::int64_t go_to = 40;
  std::int64_t patrol = 20;
  std::int64_t idle = 0;
};

struct PatrolConfig {
  Vec2 waypoint_a{-2.0, 0.0};
  Vec2 waypoint_b{2.0, 0.0};
  int laps = 2;  // 0 = patrol until preempted or a hazard is found
  double threshold = 45.0;
};

struct TransportConfig {
  Pose pickup;
  std::string requester;
  std::string command = "bring me tea";
  double placement_timeout = 120.0;
};

struct FallResponseConfig {
  double response_timeout = 15.0;
  double approach_distance = 1.0;
  double reply_delay = 2.0;  // simulated persons answer this long after a question
};

struct DialogueConfig {
  ClarificationPolicy policy;
  double approach_distance = 1.0;
  double answer_timeout = 15.0;
  std::string memory_file;  // empty: memory lives only for the session
  bool persist_memory = false;
  UnderstanderConfig understander;
};

struct ScheduledEvent {
  double at = 0.0;
  WorldEvent event;
};

struct RuntimeConfig {
  WorldState world;
  ThermalCameraConfig thermal;
  LidarConfig lidar;
  MicrophoneModel microphone;
  TactileAnalysisConfig tactile;
  DialogueConfig dialogue;
  NavigationConfig navigation;
  TaskPriorities priorities;
  PatrolConfig patrol;
  TransportConfig transport;
  FallResponseConfig fall_response;
  std::map<std::string, PayloadExpectation> payload_profiles{{"tea", {ObjectClass::Mug, 0.45, 0.05}}};
  std::map<std::string, Vec2> locations;
  std::vector<ScheduledEvent> events;
  double dt = 0.1;
  double telemetry_rate_hz = 10.0;
  double budget = 600.0;  // sim seconds a headless scenario may run
};

/// Parses the YAML world/scenario description. Throws ConfigError carrying
/// the offending line.
RuntimeConfig parse_config(const std::string& yaml_text, const std::string& source = "<config>");
RuntimeConfig load_config(const std::filesystem::path& path);

}  // namespace rico
