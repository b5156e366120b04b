#include "rico/world.hpp"

#include <algorithm>
#include <limits>

namespace rico {

namespace {

constexpr int kSweepSamples = 32;
constexpr int kBisectIterations = 48;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* what) {
  if (!finite(v)) throw WorldError(std::string("non-finite ") + what);
}

}  // namespace

const char* to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::Mug: return "mug";
    case ObjectKind::Plate: return "plate";
    case ObjectKind::Box: return "box";
    case ObjectKind::Generic: return "generic";
  }
  return "generic";
}

std::optional<ObjectKind> object_kind_from_string(std::string_view s) {
  if (s == "mug") return ObjectKind::Mug;
  if (s == "plate") return ObjectKind::Plate;
  if (s == "box") return ObjectKind::Box;
  if (s == "generic") return ObjectKind::Generic;
  return std::nullopt;
}

const SimObject* WorldState::find_object(std::string_view id) const {
  auto it = std::find_if(objects.begin(), objects.end(), [&](const SimObject& o) { return o.id == id; });
  return it == objects.end() ? nullptr : &*it;
}

const Person* WorldState::find_person(std::string_view id) const {
  auto it = std::find_if(persons.begin(), persons.end(), [&](const Person& p) { return p.id == id; });
  return it == persons.end() ? nullptr : &*it;
}

Person* WorldState::find_person(std::string_view id) {
  auto it = std::find_if(persons.begin(), persons.end(), [&](const Person& p) { return p.id == id; });
  return it == persons.end() ? nullptr : &*it;
}

std::string event_kind(const WorldEvent& e) {
  return std::visit(overloaded{
                        [](const PersonFall&) { return std::string("person_fall"); },
                        [](const PersonRespond&) { return std::string("person_respond"); },
                        [](const PlaceObject&) { return std::string("place_object"); },
                        [](const RemoveObject&) { return std::string("remove_object"); },
                        [](const Speak&) { return std::string("speak"); },
                    },
                    e);
}

double clearance(const WorldState& world, Vec2 p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Rect& r : world.obstacles) best = std::min(best, distance_to_rect(p, r));
  return best;
}

bool disc_free(const WorldState& world, Vec2 p) {
  return clearance(world, p) >= world.limits.radius;
}

bool segment_free(const WorldState& world, Vec2 a, Vec2 b, double margin) {
  for (const Rect& r : world.obstacles) {
    if (segment_rect_distance(a, b, r) < world.limits.radius + margin) return false;
  }
  return true;
}

WorldState step(const WorldState& world, double dt) {
  if (!finite(dt)) throw WorldError("non-finite dt");
  if (!(dt > 0.0 && dt <= 0.1)) throw WorldError("dt must lie in (0, 0.1]");
  require_finite(world.base_cmd.v, "linear velocity");
  require_finite(world.base_cmd.w, "angular velocity");

  WorldState next = world;
  next.clock = world.clock + dt;
  next.collided = false;

  const double v = world.base_cmd.v;
  const double w = world.base_cmd.w;
  const Vec2 p0 = world.robot.position();
  const Vec2 p1{p0.x + v * std::cos(world.robot.theta) * dt, p0.y + v * std::sin(world.robot.theta) * dt};
  next.robot.theta = normalize_angle(world.robot.theta + w * dt);

  if (p1 == p0) return next;

  if (!disc_free(world, p0)) {
    // Already in contact: refuse translation.
    next.collided = true;
    return next;
  }

  auto at = [&](double t) { return p0 + (p1 - p0) * t; };
  double lo = 0.0;
  double hi = -1.0;
  for (int k = 1; k <= kSweepSamples; ++k) {
    const double t = static_cast<double>(k) / kSweepSamples;
    if (!disc_free(world, at(t))) {
      hi = t;
      break;
    }
    lo = t;
  }
  if (hi < 0.0) {
    next.robot.x = p1.x;
    next.robot.y = p1.y;
    return next;
  }
  for (int i = 0; i < kBisectIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (disc_free(world, at(mid))) lo = mid;
    else hi = mid;
  }
  const Vec2 stop = at(lo);
  next.robot.x = stop.x;
  next.robot.y = stop.y;
  next.collided = true;
  return next;
}

WorldState command_base(const WorldState& world, double v, double w) {
  require_finite(v, "linear velocity");
  require_finite(w, "angular velocity");
  WorldState next = world;
  next.base_cmd.v = std::clamp(v, -world.limits.max_v, world.limits.max_v);
  next.base_cmd.w = std::clamp(w, -world.limits.max_w, world.limits.max_w);
  return next;
}

WorldState command_head(const WorldState& world, double pan, double tilt) {
  require_finite(pan, "pan");
  require_finite(tilt, "tilt");
  WorldState next = world;
  next.head.pan = std::clamp(pan, world.limits.pan_min, world.limits.pan_max);
  next.head.tilt = std::clamp(tilt, world.limits.tilt_min, world.limits.tilt_max);
  return next;
}

WorldState inject_event(const WorldState& world, const WorldEvent& event) {
  WorldState next = world;
  std::visit(
      overloaded{
          [&](const PersonFall& e) {
            Person* p = next.find_person(e.person_id);
            if (!p) throw WorldError("unknown person: " + e.person_id);
            p->fallen = true;
          },
          [&](const PersonRespond& e) {
            Person* p = next.find_person(e.person_id);
            if (!p) throw WorldError("unknown person: " + e.person_id);
            p->responsive = e.responsive;
          },
          [&](const PlaceObject& e) {
            if (e.object.id.empty()) throw WorldError("object id must not be empty");
            if (next.find_object(e.object.id)) throw WorldError("duplicate object id: " + e.object.id);
            if (e.on_table.has_value() == e.at_position.has_value())
              throw WorldError("place_object needs exactly one of on_table / at_position");
            if (!(e.object.mass >= 0.0)) throw WorldError("object mass must be >= 0");
            if (!(e.object.surface_temperature >= -40.0)) throw WorldError("object temperature below -40 C");
            if (!(e.object.footprint_radius > 0.0)) throw WorldError("object footprint radius must be > 0");
            SimObject obj = e.object;
            if (e.on_table) {
              require_finite(e.on_table->row, "tile row");
              require_finite(e.on_table->col, "tile col");
              obj.table_position = next.table.tile_center(e.on_table->row, e.on_table->col);
            } else {
              require_finite(e.at_position->x, "position");
              require_finite(e.at_position->y, "position");
              obj.position = *e.at_position;
              obj.table_position.reset();
            }
            next.objects.push_back(std::move(obj));
          },
          [&](const RemoveObject& e) {
            auto it = std::find_if(next.objects.begin(), next.objects.end(),
                                   [&](const SimObject& o) { return o.id == e.object_id; });
            if (it == next.objects.end()) throw WorldError("unknown object: " + e.object_id);
            next.objects.erase(it);
          },
          [&](const Speak& e) {
            if (!next.find_person(e.person_id)) throw WorldError("unknown person: " + e.person_id);
            next.pending_speech.push_back({e.person_id, e.text, next.clock});
          },
      },
      event);
  return next;
}

}  // namespace rico
