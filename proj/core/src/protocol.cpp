#include "rico/protocol.hpp"

#include <cmath>
#include <stdexcept>

#include "rico/lidar.hpp"
#include "rico/runtime.hpp"
#include "rico/tactile.hpp"

namespace rico {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxText = 1000;
constexpr std::size_t kMaxId = 64;

struct Invalid {
  std::string reason;
};

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [x, y]");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json grid(const GridPayload& g) { return {{"rows", g.rows}, {"cols", g.cols}, {"values", g.values}}; }

GridPayload grid_of(const json& j) {
  GridPayload g{j.at("rows").get<int>(), j.at("cols").get<int>(), j.at("values").get<std::vector<double>>()};
  if (g.rows < 0 || g.cols < 0 || g.values.size() != static_cast<std::size_t>(g.rows) * g.cols)
    throw std::invalid_argument("grid size does not match rows x cols");
  return g;
}

json task(const TaskSummary& t) {
  return {{"id", t.id}, {"name", t.name}, {"state", t.state}, {"priority", t.priority}};
}

TaskSummary task_of(const json& j) {
  return {j.at("id").get<std::uint64_t>(), j.at("name").get<std::string>(), j.at("state").get<std::string>(),
          j.at("priority").get<std::int64_t>()};
}

json rect(const Rect& r) { return {{"min", vec(r.min)}, {"max", vec(r.max)}}; }
Rect rect_of(const json& j) { return {vec_of(j.at("min")), vec_of(j.at("max"))}; }

GridPayload from_thermal(const ThermalFrame& f) { return {f.rows, f.cols, f.pixels}; }

// ---- command validation --------------------------------------------------------

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Invalid{std::string("missing field '") + key + "'"};
  return *it;
}

double number(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) throw Invalid{std::string("field '") + key + "' must be a number"};
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Invalid{std::string("field '") + key + "' must be finite"};
  return d;
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, key) : fallback;
}

bool boolean_or(const json& obj, const char* key, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw Invalid{std::string("field '") + key + "' must be true or false"};
  return it->get<bool>();
}

std::string text(const json& obj, const char* key, std::size_t max_len) {
  const json& v = field(obj, key);
  if (!v.is_string()) throw Invalid{std::string("field '") + key + "' must be a string"};
  std::string s = v.get<std::string>();
  if (s.empty()) throw Invalid{std::string("field '") + key + "' must not be empty"};
  if (s.size() > max_len) throw Invalid{std::string("field '") + key + "' is too long"};
  return s;
}

Vec2 pair(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw Invalid{std::string("field '") + key + "' must be [number, number]"};
  const Vec2 p{v[0].get<double>(), v[1].get<double>()};
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw Invalid{std::string("field '") + key + "' must be finite"};
  return p;
}

WorldEvent event_of(const json& e) {
  if (!e.is_object()) throw Invalid{"'event' must be an object"};
  const std::string type = text(e, "type", kMaxId);
  if (type == "person_fall") return PersonFall{text(e, "person", kMaxId)};
  if (type == "person_respond") return PersonRespond{text(e, "person", kMaxId), boolean_or(e, "responsive", true)};
  if (type == "remove_object") return RemoveObject{text(e, "object", kMaxId)};
  if (type == "speak") return Speak{text(e, "person", kMaxId), text(e, "text", kMaxText)};
  if (type == "place_object") {
    const json& o = field(e, "object");
    if (!o.is_object()) throw Invalid{"'object' must be an object"};
    PlaceObject p;
    p.object.id = text(o, "id", kMaxId);
    const std::string kind = o.contains("kind") ? text(o, "kind", kMaxId) : "generic";
    const auto k = object_kind_from_string(kind);
    if (!k) throw Invalid{"unknown object kind '" + kind + "'"};
    p.object.kind = *k;
    p.object.mass = number_or(o, "mass_kg", 0.0);
    p.object.footprint_radius = number_or(o, "radius_m", 0.03);
    p.object.surface_temperature = number_or(o, "temperature_c", 22.0);
    if (p.object.mass < 0.0) throw Invalid{"'mass_kg' must be >= 0"};
    if (!(p.object.footprint_radius > 0.0)) throw Invalid{"'radius_m' must be > 0"};
    if (p.object.surface_temperature < -40.0) throw Invalid{"'temperature_c' must be >= -40"};
    if (e.contains("on_table")) {
      const Vec2 rc = pair(e, "on_table");
      p.on_table = TileCoord{rc.x, rc.y};
    }
    if (e.contains("position")) p.at_position = pair(e, "position");
    if (p.on_table.has_value() == p.at_position.has_value())
      throw Invalid{"place_object needs exactly one of 'on_table' or 'position'"};
    return p;
  }
  throw Invalid{"unknown event type '" + type + "'"};
}

Command command_of(const json& msg) {
  if (!msg.is_object()) throw Invalid{"message must be a JSON object"};
  auto t = msg.find("type");
  if (t == msg.end() || !t->is_string()) throw Invalid{"message needs a string 'type'"};
  const std::string type = t->get<std::string>();
  if (type == "cmd_vel") return CmdVel{number(msg, "v"), number(msg, "w")};
  if (type == "head") return HeadCmd{number(msg, "pan"), number(msg, "tilt")};
  if (type == "estop") return EstopCmd{boolean_or(msg, "engage", true)};
  if (type == "speak") return SpeakCmd{text(msg, "person", kMaxId), text(msg, "text", kMaxText)};
  if (type == "inject") return InjectCmd{event_of(field(msg, "event"))};
  throw Invalid{"unknown message type"};
}

}  // namespace

// ---- telemetry ------------------------------------------------------------------

TelemetryFrame make_frame(const Runtime& rt, std::uint64_t seq) {
  const WorldState& w = rt.world();
  TelemetryFrame f;
  f.seq = seq;
  f.timestamp = w.clock;
  f.pose = w.robot;
  f.head = w.head;
  f.base_cmd = w.base_cmd;
  f.estop = rt.estopped();
  f.collided = w.collided;

  const auto active = rt.tasker().executing();
  for (const TaskRecord& r : rt.tasker().tasks()) {
    if (r.state == TaskState::Finished || r.state == TaskState::Terminated) continue;
    TaskSummary s{r.id.value, r.name, to_string(r.state), r.priority};
    if (active && *active == r.id) f.active_task = s;
    f.tasks.push_back(std::move(s));
  }

  try {
    f.lidar = lidar_scan(w, rt.config().lidar).ranges;
  } catch (const WorldError&) {
    f.lidar.clear();
  }

  const ThermalFrame thermal = render_thermal(w, rt.config().thermal);
  f.thermal = from_thermal(thermal);
  for (const auto& h : detect_hotspots(thermal, rt.config().patrol.threshold, rt.config().thermal.nominal_object_radius))
    f.hotspots.push_back({h.centroid_col, h.centroid_row, h.peak_temperature, h.bearing, h.area});

  WorldState behind = w;
  behind.robot.theta = normalize_angle(w.robot.theta + std::acos(-1.0));
  behind.head = {};
  f.rear = from_thermal(render_thermal(behind, rt.config().thermal));

  const PressureGrid tactile = read_tactile(w);
  f.tactile = {tactile.rows, tactile.cols, tactile.forces};

  const auto& entries = rt.log().entries();
  const std::size_t first = entries.size() > kTelemetryEventRing ? entries.size() - kTelemetryEventRing : 0;
  f.events.assign(entries.begin() + static_cast<std::ptrdiff_t>(first), entries.end());

  f.scene.bounds = w.bounds;
  f.scene.base_station = w.base_station;
  f.scene.obstacles = w.obstacles;
  for (const SimObject& o : w.objects)
    f.scene.objects.push_back({o.id, to_string(o.kind), o.position, o.surface_temperature, o.on_table()});
  for (const Person& p : w.persons) f.scene.persons.push_back({p.id, p.position, p.fallen});
  return f;
}

json to_json(const TelemetryFrame& f) {
  json tasks = json::array();
  for (const auto& t : f.tasks) tasks.push_back(task(t));
  json hotspots = json::array();
  for (const auto& h : f.hotspots)
    hotspots.push_back({{"col", h.col}, {"row", h.row}, {"peak", h.peak}, {"bearing", h.bearing}, {"area", h.area}});
  json events = json::array();
  for (const auto& e : f.events) events.push_back(EventLog::to_json(e));
  json obstacles = json::array();
  for (const auto& r : f.scene.obstacles) obstacles.push_back(rect(r));
  json objects = json::array();
  for (const auto& o : f.scene.objects)
    objects.push_back({{"id", o.id},
                       {"kind", o.kind},
                       {"position", vec(o.position)},
                       {"temperature", o.temperature},
                       {"on_table", o.on_table}});
  json persons = json::array();
  for (const auto& p : f.scene.persons)
    persons.push_back({{"id", p.id}, {"position", vec(p.position)}, {"fallen", p.fallen}});

  return {{"type", "telemetry"},
          {"seq", f.seq},
          {"timestamp", f.timestamp},
          {"pose", {{"x", f.pose.x}, {"y", f.pose.y}, {"theta", f.pose.theta}}},
          {"head", {{"pan", f.head.pan}, {"tilt", f.head.tilt}}},
          {"base_cmd", {{"v", f.base_cmd.v}, {"w", f.base_cmd.w}}},
          {"estop", f.estop},
          {"collided", f.collided},
          {"active_task", f.active_task ? task(*f.active_task) : json(nullptr)},
          {"tasks", std::move(tasks)},
          {"lidar", f.lidar},
          {"thermal", grid(f.thermal)},
          {"rear", grid(f.rear)},
          {"hotspots", std::move(hotspots)},
          {"tactile", grid(f.tactile)},
          {"events", std::move(events)},
          {"scene",
           {{"bounds", rect(f.scene.bounds)},
            {"base_station",
             {{"x", f.scene.base_station.x}, {"y", f.scene.base_station.y}, {"theta", f.scene.base_station.theta}}},
            {"obstacles", std::move(obstacles)},
            {"objects", std::move(objects)},
            {"persons", std::move(persons)}}}};
}

TelemetryFrame frame_from_json(const json& j) {
  if (j.at("type").get<std::string>() != "telemetry") throw std::invalid_argument("not a telemetry message");
  TelemetryFrame f;
  f.seq = j.at("seq").get<std::uint64_t>();
  f.timestamp = j.at("timestamp").get<double>();
  const json& pose = j.at("pose");
  f.pose = {pose.at("x").get<double>(), pose.at("y").get<double>(), pose.at("theta").get<double>()};
  f.head = {j.at("head").at("pan").get<double>(), j.at("head").at("tilt").get<double>()};
  f.base_cmd = {j.at("base_cmd").at("v").get<double>(), j.at("base_cmd").at("w").get<double>()};
  f.estop = j.at("estop").get<bool>();
  f.collided = j.at("collided").get<bool>();
  if (!j.at("active_task").is_null()) f.active_task = task_of(j.at("active_task"));
  for (const auto& t : j.at("tasks")) f.tasks.push_back(task_of(t));
  f.lidar = j.at("lidar").get<std::vector<double>>();
  f.thermal = grid_of(j.at("thermal"));
  f.rear = grid_of(j.at("rear"));
  for (const auto& h : j.at("hotspots"))
    f.hotspots.push_back({h.at("col").get<double>(), h.at("row").get<double>(), h.at("peak").get<double>(),
                          h.at("bearing").get<double>(), h.at("area").get<int>()});
  f.tactile = grid_of(j.at("tactile"));
  for (const auto& e : j.at("events"))
    f.events.push_back({e.at("t").get<double>(), e.at("kind").get<std::string>(), e.at("payload")});
  if (f.events.size() > kTelemetryEventRing) throw std::invalid_argument("too many events");
  const json& s = j.at("scene");
  f.scene.bounds = rect_of(s.at("bounds"));
  const json& b = s.at("base_station");
  f.scene.base_station = {b.at("x").get<double>(), b.at("y").get<double>(), b.at("theta").get<double>()};
  for (const auto& r : s.at("obstacles")) f.scene.obstacles.push_back(rect_of(r));
  for (const auto& o : s.at("objects"))
    f.scene.objects.push_back({o.at("id").get<std::string>(), o.at("kind").get<std::string>(),
                               vec_of(o.at("position")), o.at("temperature").get<double>(),
                               o.at("on_table").get<bool>()});
  for (const auto& p : s.at("persons"))
    f.scene.persons.push_back({p.at("id").get<std::string>(), vec_of(p.at("position")), p.at("fallen").get<bool>()});
  return f;
}

std::string encode(const TelemetryFrame& frame) {
  return to_json(frame).dump(-1, ' ', false, json::error_handler_t::replace);
}

TelemetryFrame decode_frame(std::string_view text) { return frame_from_json(json::parse(text)); }

// ---- commands -------------------------------------------------------------------

std::variant<Command, CommandError> parse_command(std::string_view text) noexcept {
  try {
    const json msg = json::parse(text, nullptr, false);
    if (msg.is_discarded()) return CommandError{"malformed JSON"};
    return command_of(msg);
  } catch (const Invalid& e) {
    return CommandError{e.reason};
  } catch (const std::exception& e) {
    return CommandError{std::string("invalid message: ") + e.what()};
  } catch (...) {
    return CommandError{"invalid message"};
  }
}

std::string command_type(const Command& c) {
  switch (c.index()) {
    case 0: return "cmd_vel";
    case 1: return "head";
    case 2: return "estop";
    case 3: return "speak";
    default: return "inject";
  }
}

std::string error_message(std::string_view reason) {
  // Reasons can quote client input; replace invalid UTF-8 instead of throwing.
  return json{{"type", "error"}, {"reason", std::string(reason)}}.dump(-1, ' ', false,
                                                                        json::error_handler_t::replace);
}

std::string hello_message(const Runtime& rt) {
  json persons = json::array();
  for (const Person& p : rt.world().persons) persons.push_back(p.id);
  return json{{"type", "hello"},
              {"version", kProtocolVersion},
              {"telemetry_hz", rt.config().telemetry_rate_hz},
              {"limits",
               {{"max_v", rt.world().limits.max_v},
                {"max_w", rt.world().limits.max_w},
                {"pan", {rt.world().limits.pan_min, rt.world().limits.pan_max}},
                {"tilt", {rt.world().limits.tilt_min, rt.world().limits.tilt_max}}}},
              {"persons", std::move(persons)}}
      .dump();
}

std::optional<std::string> apply_command(Runtime& rt, const Command& c) {
  try {
    if (const auto* v = std::get_if<CmdVel>(&c)) {
      rt.teleop_base(v->v, v->w);
    } else if (const auto* h = std::get_if<HeadCmd>(&c)) {
      rt.teleop_head(h->pan, h->tilt);
    } else if (const auto* e = std::get_if<EstopCmd>(&c)) {
      rt.set_estop(e->engage);
    } else if (const auto* s = std::get_if<SpeakCmd>(&c)) {
      rt.inject(Speak{s->person, s->text});
    } else if (const auto* i = std::get_if<InjectCmd>(&c)) {
      rt.inject(i->event);
    }
  } catch (const std::exception& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

}  // namespace rico
