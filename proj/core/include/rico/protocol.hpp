#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rico/event_log.hpp"
#include "rico/thermal.hpp"
#include "rico/world.hpp"

// Wire format shared with the browser client. Field names are fixed by
// docs/protocol.schema.json; change both together.

namespace rico {

class Runtime;

inline constexpr const char* kProtocolVersion = "rico-teleop/1";
inline constexpr std::size_t kTelemetryEventRing = 32;

struct TaskSummary {
  std::uint64_t id = 0;
  std::string name;
  std::string state;
  std::int64_t priority = 0;
  friend bool operator==(const TaskSummary&, const TaskSummary&) = default;
};

struct GridPayload {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major
  friend bool operator==(const GridPayload&, const GridPayload&) = default;
};

struct HotspotPayload {
  double col = 0.0;
  double row = 0.0;
  double peak = 0.0;
  double bearing = 0.0;
  int area = 0;
  friend bool operator==(const HotspotPayload&, const HotspotPayload&) = default;
};

struct SceneObject {
  std::string id;
  std::string kind;
  Vec2 position;
  double temperature = 0.0;
  bool on_table = false;
  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct ScenePerson {
  std::string id;
  Vec2 position;
  bool fallen = false;
  friend bool operator==(const ScenePerson&, const ScenePerson&) = default;
};

/// Top-down view standing in for the robot's RGB cameras.
struct Scene {
  Rect bounds;
  Pose base_station;
  std::vector<Rect> obstacles;
  std::vector<SceneObject> objects;
  std::vector<ScenePerson> persons;
  friend bool operator==(const Scene&, const Scene&) = default;
};

struct TelemetryFrame {
  std::uint64_t seq = 0;
  double timestamp = 0.0;  // sim seconds
  Pose pose;
  HeadPose head;
  BaseCommand base_cmd;
  bool estop = false;
  bool collided = false;
  std::optional<TaskSummary> active_task;
  std::vector<TaskSummary> tasks;  // every task not yet finished or terminated
  std::vector<double> lidar;
  GridPayload thermal;
  GridPayload rear;  // thermal view from the back of the robot
  std::vector<HotspotPayload> hotspots;
  GridPayload tactile;
  std::vector<LogEvent> events;  // newest last, at most kTelemetryEventRing
  Scene scene;
  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

/// Samples every sensor and the tasker. `seq` is supplied by the caller.
TelemetryFrame make_frame(const Runtime& rt, std::uint64_t seq);

nlohmann::json to_json(const TelemetryFrame& frame);
/// Throws std::invalid_argument (or nlohmann exceptions) on a malformed frame.
TelemetryFrame frame_from_json(const nlohmann::json& j);
std::string encode(const TelemetryFrame& frame);
TelemetryFrame decode_frame(std::string_view text);

// ---- client -> server ---------------------------------------------------------

struct CmdVel {
  double v = 0.0;
  double w = 0.0;
};
struct HeadCmd {
  double pan = 0.0;
  double tilt = 0.0;
};
struct EstopCmd {
  bool engage = true;
};
struct SpeakCmd {
  std::string person;
  std::string text;
};
struct InjectCmd {
  WorldEvent event;
};

using Command = std::variant<CmdVel, HeadCmd, EstopCmd, SpeakCmd, InjectCmd>;

struct CommandError {
  std::string reason;
};

/// Validates one text message. Total: every input yields a Command or a
/// CommandError, nothing throws.
std::variant<Command, CommandError> parse_command(std::string_view text) noexcept;

std::string command_type(const Command& c);
std::string error_message(std::string_view reason);
std::string hello_message(const Runtime& rt);

/// Applies a validated command to the runtime. Returns an error reason when
/// the world rejects it (unknown ids and the like).
std::optional<std::string> apply_command(Runtime& rt, const Command& c);

}  // namespace rico
