#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rico/geometry.hpp"

namespace rico {

/// Thrown when a world operation rejects its input. The input state is left
/// untouched because every world operation returns a new value.
class WorldError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // (-pi, pi]

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct HeadPose {
  double pan = 0.0;
  double tilt = 0.0;
  friend bool operator==(const HeadPose&, const HeadPose&) = default;
};

struct BaseCommand {
  double v = 0.0;  // m/s
  double w = 0.0;  // rad/s
  friend bool operator==(const BaseCommand&, const BaseCommand&) = default;
};

/// Platform constants. Defaults describe a TIAGo-class base.
struct RobotLimits {
  double radius = 0.27;
  double max_v = 1.0;
  double max_w = 1.5;
  double pan_min = -1.3;
  double pan_max = 1.3;
  double tilt_min = -0.98;
  double tilt_max = 0.72;
  friend bool operator==(const RobotLimits&, const RobotLimits&) = default;
};

enum class ObjectKind { Mug, Plate, Box, Generic };

const char* to_string(ObjectKind k);
std::optional<ObjectKind> object_kind_from_string(std::string_view s);

struct SimObject {
  std::string id;
  ObjectKind kind = ObjectKind::Generic;
  Vec2 position;  // world frame, ignored while on the table
  double surface_temperature = 22.0;
  double mass = 0.0;
  double footprint_radius = 0.03;
  // Set while the object rests on the tactile table; table frame meters.
  std::optional<Vec2> table_position;

  bool on_table() const { return table_position.has_value(); }
  friend bool operator==(const SimObject&, const SimObject&) = default;
};

struct Person {
  std::string id;
  Vec2 position;
  bool fallen = false;
  bool responsive = true;
  friend bool operator==(const Person&, const Person&) = default;
};

/// Tactile table placement. `origin` is the robot-frame position of the
/// outer corner of tile (0, 0); rows grow along table y, columns along x.
struct TableFrame {
  Vec2 origin{-0.14, -0.15};
  int rows = 15;
  int cols = 14;
  double pitch = 0.02;

  /// Table-frame position of a tile's center for fractional indices.
  Vec2 tile_center(double row, double col) const {
    return {(col + 0.5) * pitch, (row + 0.5) * pitch};
  }
  friend bool operator==(const TableFrame&, const TableFrame&) = default;
};

struct Utterance {
  std::string person_id;
  std::string text;
  double time = 0.0;
  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct WorldState {
  double clock = 0.0;
  Pose robot;
  HeadPose head;
  BaseCommand base_cmd;
  std::vector<SimObject> objects;
  std::vector<Person> persons;
  std::vector<Rect> obstacles;
  Rect bounds{{-5.0, -5.0}, {5.0, 5.0}};
  Pose base_station;
  TableFrame table;
  RobotLimits limits;
  double ambient_temperature = 22.0;
  std::uint64_t rng_seed = 0;
  bool collided = false;
  // Speech emitted by persons and not yet consumed by the listener.
  std::vector<Utterance> pending_speech;

  const SimObject* find_object(std::string_view id) const;
  const Person* find_person(std::string_view id) const;
  Person* find_person(std::string_view id);

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// ---- events ---------------------------------------------------------------

struct PersonFall {
  std::string person_id;
};
struct PersonRespond {
  std::string person_id;
  bool responsive = true;
};
struct TileCoord {
  double row = 0.0;
  double col = 0.0;
};
struct PlaceObject {
  SimObject object;
  // Exactly one of these is set.
  std::optional<TileCoord> on_table;
  std::optional<Vec2> at_position;
};
struct RemoveObject {
  std::string object_id;
};
struct Speak {
  std::string person_id;
  std::string text;
};

using WorldEvent = std::variant<PersonFall, PersonRespond, PlaceObject, RemoveObject, Speak>;

std::string event_kind(const WorldEvent& e);

// ---- operations -----------------------------------------------------------

/// Advances the world by dt seconds with unicycle kinematics and explicit
/// Euler integration. Motion into an obstacle is clamped at the last
/// contact-free point along the step and sets `collided`.
WorldState step(const WorldState& world, double dt);

WorldState command_base(const WorldState& world, double v, double w);
WorldState command_head(const WorldState& world, double pan, double tilt);

/// Applies an event at the current clock. Unknown ids throw WorldError.
WorldState inject_event(const WorldState& world, const WorldEvent& event);

/// Clearance from p to the nearest obstacle (infinity with no obstacles).
double clearance(const WorldState& world, Vec2 p);

/// True when a robot disc centered at p does not overlap any obstacle interior.
bool disc_free(const WorldState& world, Vec2 p);

/// True when a robot disc, grown by `margin`, swept along [a, b] stays clear
/// of every obstacle.
bool segment_free(const WorldState& world, Vec2 a, Vec2 b, double margin = 0.0);

}  // namespace rico
