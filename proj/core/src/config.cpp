#include "rico/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rico {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message), line_(line) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const int line = at.IsDefined() && at.Mark().line >= 0 ? at.Mark().line + 1 : 0;
    throw ConfigError(source_, line, msg);
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + ": expected a number");
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, what + ": expected a number, got '" + n.Scalar() + "'");
    }
    if (!std::isfinite(v)) fail(n, what + ": must be finite");
    return v;
  }

  double number(const YAML::Node& map, const char* key, double fallback) const {
    const YAML::Node n = map[key];
    return n ? number(n, key) : fallback;
  }

  std::int64_t integer(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + ": expected an integer");
    try {
      return n.as<std::int64_t>();
    } catch (const YAML::Exception&) {
      fail(n, what + ": expected an integer, got '" + n.Scalar() + "'");
    }
  }

  std::int64_t integer(const YAML::Node& map, const char* key, std::int64_t fallback) const {
    const YAML::Node n = map[key];
    return n ? integer(n, key) : fallback;
  }

  bool boolean(const YAML::Node& map, const char* key, bool fallback) const {
    const YAML::Node n = map[key];
    if (!n) return fallback;
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, std::string(key) + ": expected true/false");
    }
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + ": expected a string");
    return n.Scalar();
  }

  std::string text(const YAML::Node& map, const char* key, const std::string& fallback) const {
    const YAML::Node n = map[key];
    return n ? text(n, key) : fallback;
  }

  std::string required_text(const YAML::Node& map, const char* key) const {
    const YAML::Node n = map[key];
    if (!n) fail(map, std::string("missing '") + key + "'");
    return text(n, key);
  }

  Vec2 vec2(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() != 2) fail(n, what + ": expected [x, y]");
    return {number(n[0], what), number(n[1], what)};
  }

  Vec2 vec2(const YAML::Node& map, const char* key, Vec2 fallback) const {
    const YAML::Node n = map[key];
    return n ? vec2(n, key) : fallback;
  }

  Pose pose(const YAML::Node& n, const std::string& what) const {
    if (n.IsSequence()) {
      if (n.size() != 2 && n.size() != 3) fail(n, what + ": expected [x, y] or [x, y, theta]");
      Pose p{number(n[0], what), number(n[1], what), n.size() == 3 ? number(n[2], what) : 0.0};
      p.theta = normalize_angle(p.theta);
      return p;
    }
    if (!n.IsMap()) fail(n, what + ": expected {x, y, theta}");
    Pose p{number(n, "x", 0.0), number(n, "y", 0.0), normalize_angle(number(n, "theta", 0.0))};
    return p;
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (n && !n.IsMap()) fail(n, what + ": expected a mapping");
  }

  void only_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& what) const {
    if (!n || !n.IsMap()) return;
    for (const auto& kv : n) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, what + ": unknown key '" + key + "'");
    }
  }

  SimObject object(const YAML::Node& n) const {
    if (!n.IsMap()) fail(n, "object: expected a mapping");
    SimObject o;
    o.id = required_text(n, "id");
    const std::string kind = text(n, "kind", "generic");
    const auto k = object_kind_from_string(kind);
    if (!k) fail(n["kind"], "object kind must be one of mug, plate, box, generic");
    o.kind = *k;
    o.surface_temperature = number(n, "temperature_c", 22.0);
    o.mass = number(n, "mass_kg", 0.0);
    o.footprint_radius = number(n, "radius_m", 0.03);
    if (o.mass < 0.0) fail(n["mass_kg"], "mass_kg must be >= 0");
    if (o.surface_temperature < -40.0) fail(n["temperature_c"], "temperature_c must be >= -40");
    if (o.footprint_radius <= 0.0) fail(n["radius_m"], "radius_m must be > 0");
    return o;
  }

  WorldEvent event(const YAML::Node& n, const WorldState& world) const {
    const std::string type = required_text(n, "type");
    if (type == "person_fall") return PersonFall{required_text(n, "person")};
    if (type == "person_respond") return PersonRespond{required_text(n, "person"), boolean(n, "responsive", true)};
    if (type == "remove_object") return RemoveObject{required_text(n, "object")};
    if (type == "speak") return Speak{required_text(n, "person"), required_text(n, "text")};
    if (type == "place_object") {
      if (!n["object"]) fail(n, "place_object: missing 'object'");
      PlaceObject p;
      p.object = object(n["object"]);
      if (n["on_table"]) {
        const Vec2 rc = vec2(n["on_table"], "on_table");
        p.on_table = TileCoord{rc.x, rc.y};
      }
      if (n["position"]) p.at_position = vec2(n["position"], "position");
      if (p.on_table.has_value() == p.at_position.has_value())
        fail(n, "place_object: give exactly one of on_table: [row, col] or position: [x, y]");
      (void)world;
      return p;
    }
    fail(n["type"], "unknown event type '" + type + "'");
  }

 private:
  std::string source_;
};

void load_world(const Reader& rd, const YAML::Node& w, RuntimeConfig& cfg) {
  rd.only_keys(w,
               {"bounds", "ambient_c", "robot", "head", "base_station", "table", "limits", "obstacles", "objects",
                "persons", "locations", "seed"},
               "world");
  WorldState& world = cfg.world;
  if (const YAML::Node b = w["bounds"]) {
    world.bounds = {rd.vec2(b, "min", world.bounds.min), rd.vec2(b, "max", world.bounds.max)};
    if (!world.bounds.valid()) rd.fail(b, "bounds: min must be below max");
  }
  world.ambient_temperature = rd.number(w, "ambient_c", world.ambient_temperature);
  if (w["robot"]) world.robot = rd.pose(w["robot"], "robot");
  if (const YAML::Node h = w["head"]) world.head = {rd.number(h, "pan", 0.0), rd.number(h, "tilt", 0.0)};
  if (w["base_station"]) world.base_station = rd.pose(w["base_station"], "base_station");
  if (const YAML::Node t = w["table"]) {
    world.table.rows = static_cast<int>(rd.integer(t, "rows", world.table.rows));
    world.table.cols = static_cast<int>(rd.integer(t, "cols", world.table.cols));
    world.table.pitch = rd.number(t, "pitch", world.table.pitch);
    world.table.origin = rd.vec2(t, "origin", world.table.origin);
    if (world.table.rows < 3 || world.table.cols < 3 || world.table.pitch <= 0.0) rd.fail(t, "table: bad dimensions");
  }
  if (const YAML::Node l = w["limits"]) {
    RobotLimits& lim = world.limits;
    lim.radius = rd.number(l, "radius", lim.radius);
    lim.max_v = rd.number(l, "max_v", lim.max_v);
    lim.max_w = rd.number(l, "max_w", lim.max_w);
    const Vec2 pan = rd.vec2(l, "pan", {lim.pan_min, lim.pan_max});
    const Vec2 tilt = rd.vec2(l, "tilt", {lim.tilt_min, lim.tilt_max});
    lim.pan_min = pan.x;
    lim.pan_max = pan.y;
    lim.tilt_min = tilt.x;
    lim.tilt_max = tilt.y;
  }
  if (const YAML::Node obs = w["obstacles"]) {
    if (!obs.IsSequence()) rd.fail(obs, "obstacles: expected a list");
    for (const YAML::Node& o : obs) {
      Rect r{rd.vec2(o["min"], "obstacle min"), rd.vec2(o["max"], "obstacle max")};
      if (!r.valid()) rd.fail(o, "obstacle: min must be below max");
      world.obstacles.push_back(r);
    }
  }
  if (const YAML::Node objs = w["objects"]) {
    if (!objs.IsSequence()) rd.fail(objs, "objects: expected a list");
    for (const YAML::Node& o : objs) {
      SimObject obj = rd.object(o);
      if (world.find_object(obj.id)) rd.fail(o, "duplicate object id '" + obj.id + "'");
      if (o["on_table"]) {
        const Vec2 rc = rd.vec2(o["on_table"], "on_table");
        obj.table_position = world.table.tile_center(rc.x, rc.y);
      } else {
        obj.position = rd.vec2(o, "position", {});
      }
      world.objects.push_back(std::move(obj));
    }
  }
  if (const YAML::Node ps = w["persons"]) {
    if (!ps.IsSequence()) rd.fail(ps, "persons: expected a list");
    for (const YAML::Node& p : ps) {
      Person person;
      person.id = rd.required_text(p, "id");
      if (world.find_person(person.id)) rd.fail(p, "duplicate person id '" + person.id + "'");
      person.position = rd.vec2(p, "position", {});
      person.responsive = rd.boolean(p, "responsive", true);
      person.fallen = rd.boolean(p, "fallen", false);
      world.persons.push_back(std::move(person));
    }
  }
  if (const YAML::Node locs = w["locations"]) {
    rd.expect_map(locs, "locations");
    for (const auto& kv : locs) cfg.locations[kv.first.as<std::string>()] = rd.vec2(kv.second, kv.first.as<std::string>());
  }
  if (w["seed"]) world.rng_seed = static_cast<std::uint64_t>(rd.integer(w["seed"], "seed"));
  for (const Rect& r : world.obstacles)
    if (r.contains_strict(world.robot.position())) rd.fail(w["robot"], "robot starts inside an obstacle");
}

void load_sensors(const Reader& rd, const YAML::Node& s, RuntimeConfig& cfg) {
  rd.only_keys(s, {"thermal", "lidar", "microphone", "tactile"}, "sensors");
  if (const YAML::Node t = s["thermal"]) {
    cfg.thermal.cols = static_cast<int>(rd.integer(t, "cols", cfg.thermal.cols));
    cfg.thermal.rows = static_cast<int>(rd.integer(t, "rows", cfg.thermal.rows));
    cfg.thermal.hfov = rd.number(t, "hfov", cfg.thermal.hfov);
    cfg.thermal.max_range = rd.number(t, "max_range", cfg.thermal.max_range);
    cfg.patrol.threshold = rd.number(t, "threshold_c", cfg.patrol.threshold);
    if (cfg.thermal.cols <= 0 || cfg.thermal.rows <= 0 || cfg.thermal.hfov <= 0.0) rd.fail(t, "thermal: bad camera model");
  }
  if (const YAML::Node l = s["lidar"]) {
    cfg.lidar.beams = static_cast<int>(rd.integer(l, "beams", cfg.lidar.beams));
    cfg.lidar.max_range = rd.number(l, "max_range", cfg.lidar.max_range);
    if (cfg.lidar.beams <= 0 || cfg.lidar.max_range <= 0.0) rd.fail(l, "lidar: bad model");
  }
  if (const YAML::Node m = s["microphone"]) {
    cfg.microphone.omni_range = rd.number(m, "omni_range", cfg.microphone.omni_range);
    cfg.microphone.directional_range = rd.number(m, "directional_range", cfg.microphone.directional_range);
    if (cfg.microphone.omni_range <= 0.0 || cfg.microphone.directional_range <= 0.0) rd.fail(m, "microphone: ranges must be > 0");
  }
  if (const YAML::Node t = s["tactile"]) {
    cfg.tactile.presence_threshold = rd.number(t, "presence_threshold", cfg.tactile.presence_threshold);
    cfg.tactile.active_threshold = rd.number(t, "active_threshold", cfg.tactile.active_threshold);
    cfg.tactile.min_iou = rd.number(t, "min_iou", cfg.tactile.min_iou);
  }
}

void load_dialogue(const Reader& rd, const YAML::Node& d, RuntimeConfig& cfg) {
  rd.only_keys(d,
               {"accept_threshold", "repeat_threshold", "attempt_cap", "approach_distance", "answer_timeout_s",
                "memory_file", "persist_memory"},
               "dialogue");
  DialogueConfig& dc = cfg.dialogue;
  dc.policy.accept_threshold = rd.number(d, "accept_threshold", dc.policy.accept_threshold);
  dc.policy.repeat_threshold = rd.number(d, "repeat_threshold", dc.policy.repeat_threshold);
  dc.policy.attempt_cap = static_cast<int>(rd.integer(d, "attempt_cap", dc.policy.attempt_cap));
  dc.approach_distance = rd.number(d, "approach_distance", dc.approach_distance);
  dc.answer_timeout = rd.number(d, "answer_timeout_s", dc.answer_timeout);
  dc.memory_file = rd.text(d, "memory_file", dc.memory_file);
  dc.persist_memory = rd.boolean(d, "persist_memory", dc.persist_memory);
  if (dc.policy.repeat_threshold > dc.policy.accept_threshold) rd.fail(d, "repeat_threshold must not exceed accept_threshold");
  if (dc.policy.attempt_cap < 0) rd.fail(d["attempt_cap"], "attempt_cap must be >= 0");
}

void load_scenarios(const Reader& rd, const YAML::Node& s, RuntimeConfig& cfg) {
  rd.only_keys(s, {"patrol", "transport", "fall_response", "payload_profiles", "budget_s"}, "scenarios");
  if (const YAML::Node p = s["patrol"]) {
    cfg.patrol.waypoint_a = rd.vec2(p, "a", cfg.patrol.waypoint_a);
    cfg.patrol.waypoint_b = rd.vec2(p, "b", cfg.patrol.waypoint_b);
    cfg.patrol.laps = static_cast<int>(rd.integer(p, "laps", cfg.patrol.laps));
    cfg.patrol.threshold = rd.number(p, "threshold_c", cfg.patrol.threshold);
    if (cfg.patrol.laps < 0) rd.fail(p["laps"], "laps must be >= 0");
  }
  if (const YAML::Node t = s["transport"]) {
    if (t["pickup"]) cfg.transport.pickup = rd.pose(t["pickup"], "pickup");
    cfg.transport.requester = rd.text(t, "requester", cfg.transport.requester);
    cfg.transport.command = rd.text(t, "command", cfg.transport.command);
    cfg.transport.placement_timeout = rd.number(t, "placement_timeout_s", cfg.transport.placement_timeout);
  }
  if (const YAML::Node f = s["fall_response"]) {
    cfg.fall_response.response_timeout = rd.number(f, "response_timeout_s", cfg.fall_response.response_timeout);
    cfg.fall_response.approach_distance = rd.number(f, "approach_distance", cfg.fall_response.approach_distance);
    cfg.fall_response.reply_delay = rd.number(f, "reply_delay_s", cfg.fall_response.reply_delay);
  }
  if (const YAML::Node profiles = s["payload_profiles"]) {
    rd.expect_map(profiles, "payload_profiles");
    cfg.payload_profiles.clear();
    for (const auto& kv : profiles) {
      const YAML::Node p = kv.second;
      PayloadExpectation e;
      const std::string cls = rd.text(p, "class", "mug");
      const auto c = object_class_from_string(cls);
      if (!c) rd.fail(p["class"], "class must be one of mug, plate, box, unknown");
      e.object_class = *c;
      e.weight_kg = rd.number(p, "weight_kg", 0.0);
      e.tolerance_kg = rd.number(p, "tolerance_kg", 0.05);
      if (e.tolerance_kg <= 0.0) rd.fail(p, "tolerance_kg must be > 0");
      cfg.payload_profiles[kv.first.as<std::string>()] = e;
    }
  }
  cfg.budget = rd.number(s, "budget_s", cfg.budget);
}

}  // namespace

RuntimeConfig parse_config(const std::string& yaml_text, const std::string& source) {
  Reader rd(source);
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  RuntimeConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) rd.fail(root, "top level must be a mapping");
  rd.only_keys(root, {"world", "sensors", "dialogue", "navigation", "tasker", "scenarios", "events", "simulation"}, "config");

  try {
    if (const YAML::Node w = root["world"]) load_world(rd, w, cfg);
    if (const YAML::Node s = root["sensors"]) load_sensors(rd, s, cfg);
    if (const YAML::Node d = root["dialogue"]) load_dialogue(rd, d, cfg);
    if (const YAML::Node n = root["navigation"]) {
      NavigationConfig& nc = cfg.navigation;
      nc.speed = rd.number(n, "speed", nc.speed);
      nc.arrival_tolerance = rd.number(n, "arrival_tolerance", nc.arrival_tolerance);
      nc.planning_margin = rd.number(n, "planning_margin", nc.planning_margin);
    }
    if (const YAML::Node t = root["tasker"]) {
      if (const YAML::Node p = t["priorities"]) {
        rd.only_keys(p, {"fall_response", "safety_stop", "hazard_report", "transport", "goto", "patrol", "idle"}, "priorities");
        TaskPriorities& tp = cfg.priorities;
        tp.fall_response = rd.integer(p, "fall_response", tp.fall_response);
        tp.safety_stop = rd.integer(p, "safety_stop", tp.safety_stop);
        tp.hazard_report = rd.integer(p, "hazard_report", tp.hazard_report);
        tp.transport = rd.integer(p, "transport", tp.transport);
        tp.go_to = rd.integer(p, "goto", tp.go_to);
        tp.patrol = rd.integer(p, "patrol", tp.patrol);
        tp.idle = rd.integer(p, "idle", tp.idle);
      }
    }
    if (const YAML::Node s = root["scenarios"]) load_scenarios(rd, s, cfg);
    if (const YAML::Node ev = root["events"]) {
      if (!ev.IsSequence()) rd.fail(ev, "events: expected a list");
      for (const YAML::Node& e : ev) {
        if (!e.IsMap()) rd.fail(e, "event: expected a mapping");
        const YAML::Node at = e["at"];
        if (!at) rd.fail(e, "event: missing 'at'");
        cfg.events.push_back({rd.number(at, "at"), rd.event(e, cfg.world)});
      }
      std::stable_sort(cfg.events.begin(), cfg.events.end(),
                       [](const ScheduledEvent& a, const ScheduledEvent& b) { return a.at < b.at; });
    }
    if (const YAML::Node sim = root["simulation"]) {
      cfg.dt = rd.number(sim, "dt", cfg.dt);
      cfg.telemetry_rate_hz = rd.number(sim, "telemetry_hz", cfg.telemetry_rate_hz);
      if (!(cfg.dt > 0.0 && cfg.dt <= 0.1)) rd.fail(sim["dt"], "dt must lie in (0, 0.1]");
      if (!(cfg.telemetry_rate_hz > 0.0)) rd.fail(sim["telemetry_hz"], "telemetry_hz must be > 0");
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  return cfg;
}

RuntimeConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace rico
