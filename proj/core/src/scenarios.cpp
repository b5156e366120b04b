#include "rico/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rico/navigation.hpp"
#include "rico/tactile.hpp"
#include "rico/thermal.hpp"

namespace rico {

using nlohmann::json;

namespace {

ScenarioOutcome outcome(OutcomeStatus status, std::vector<std::string> reasons = {}) {
  ScenarioOutcome o;
  o.status = status;
  o.reasons = std::move(reasons);
  return o;
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

double bearing_to(const WorldState& w, Vec2 target) {
  const Vec2 rel = target - w.robot.position();
  return normalize_angle(std::atan2(rel.y, rel.x) - w.robot.theta);
}

// Rotates the base towards `heading_error` (robot frame). Returns true once
// aligned within `tol`.
bool turn_towards(Runtime& rt, double heading_error, double tol = 0.05) {
  if (std::abs(heading_error) <= tol) {
    rt.command_base(0.0, 0.0);
    return true;
  }
  const auto& nav = rt.config().navigation;
  rt.command_base(0.0, std::clamp(nav.turn_gain * heading_error, -nav.max_turn_rate, nav.max_turn_rate));
  return false;
}

// ---- patrol -------------------------------------------------------------------

class PatrolBody final : public TaskBody {
 public:
  explicit PatrolBody(PatrolConfig cfg) : cfg_(cfg) {}

  void start(Runtime& rt) override {
    rt.command_head(0.0, 0.0);
    head_for_target(rt);
  }

  std::string save() const override {
    return json{{"laps", laps_}, {"target", target_}, {"visited_b", visited_b_}}.dump();
  }

  void restore(Runtime& rt, std::string_view context) override {
    const json j = json::parse(context);
    laps_ = j.at("laps").get<int>();
    target_ = j.at("target").get<int>();
    visited_b_ = j.at("visited_b").get<bool>();
    rt.command_head(0.0, 0.0);
    head_for_target(rt);
  }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    if (unreachable_) return outcome(OutcomeStatus::Aborted, {"waypoint_unreachable"});

    const WorldState& w = rt.world();
    const ThermalFrame frame = render_thermal(w, rt.config().thermal);
    const auto hits = detect_hotspots(frame, cfg_.threshold, rt.config().thermal.nominal_object_radius);
    if (!hits.empty()) {
      const auto hottest = std::max_element(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.peak_temperature < b.peak_temperature;
      });
      // Reported bearing is in the world frame so it still means something
      // once the robot has driven to the base.
      const double bearing = normalize_angle(w.robot.theta + hottest->bearing);
      rt.emit("hazard_detected", {{"peak_temperature", hottest->peak_temperature},
                                  {"bearing", bearing},
                                  {"estimated_range", hottest->estimated_range},
                                  {"pixel", {hottest->centroid_col, hottest->centroid_row}},
                                  {"robot", vec_json(w.robot.position())}});
      rt.submit_hazard_report(rt.time(), bearing, hottest->peak_temperature);
      return outcome(OutcomeStatus::Success, {"hazard_detected"});
    }

    BaseCommand cmd;
    switch (nav_.update(w, cmd)) {
      case Navigator::Status::Failed:
        rt.emit("abort", {{"reason", "waypoint_unreachable"}});
        return outcome(OutcomeStatus::Aborted, {"waypoint_unreachable"});
      case Navigator::Status::Arrived:
        if (target_ == 1) {
          visited_b_ = true;
          target_ = 0;
        } else {
          if (visited_b_) {
            ++laps_;
            visited_b_ = false;
            rt.emit("patrol_lap", {{"lap", laps_}});
            if (cfg_.laps > 0 && laps_ >= cfg_.laps) return outcome(OutcomeStatus::Success, {});
          }
          target_ = 1;
        }
        rt.command_base(0.0, 0.0);
        head_for_target(rt);
        return std::nullopt;
      default:
        rt.command_base(cmd.v, cmd.w);
        return std::nullopt;
    }
  }

 private:
  void head_for_target(Runtime& rt) {
    nav_ = Navigator(rt.config().navigation);
    const Vec2 goal = target_ == 0 ? cfg_.waypoint_a : cfg_.waypoint_b;
    if (!nav_.go_to(rt.world(), goal, rt.config().navigation.arrival_tolerance)) {
      rt.emit("abort", {{"reason", "waypoint_unreachable"}, {"goal", vec_json(goal)}});
      unreachable_ = true;
      return;
    }
    rt.emit("navigate", {{"goal", vec_json(goal)}, {"waypoints", nav_.path().size()}});
  }

  PatrolConfig cfg_;
  Navigator nav_;
  int laps_ = 0;
  int target_ = 0;  // 0 = A, 1 = B
  bool visited_b_ = false;
  bool unreachable_ = false;
};

// ---- hazard report ------------------------------------------------------------

class HazardReportBody final : public TaskBody {
 public:
  HazardReportBody(double detected_at, double bearing, double peak)
      : detected_at_(detected_at), bearing_(bearing), peak_(peak) {}

  void start(Runtime& rt) override { plan(rt); }
  std::string save() const override { return "{}"; }
  void restore(Runtime& rt, std::string_view) override { plan(rt); }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    if (unreachable_) return outcome(OutcomeStatus::Aborted, {"base_unreachable"});
    BaseCommand cmd;
    const auto st = nav_.update(rt.world(), cmd);
    if (st == Navigator::Status::Failed) {
      rt.emit("abort", {{"reason", "base_unreachable"}});
      return outcome(OutcomeStatus::Aborted, {"base_unreachable"});
    }
    if (st != Navigator::Status::Arrived) {
      rt.command_base(cmd.v, cmd.w);
      return std::nullopt;
    }
    rt.command_base(0.0, 0.0);
    const double d = distance(rt.world().robot.position(), rt.world().base_station.position());
    HazardReport report{detected_at_, bearing_, peak_, d <= 0.5, rt.time(), d};
    rt.record_hazard(report);
    char text[96];
    std::snprintf(text, sizeof text, "Warning: I found a hot object at %.1f degrees Celsius.", peak_);
    rt.say(text);
    return outcome(OutcomeStatus::Success, {});
  }

 private:
  void plan(Runtime& rt) {
    nav_ = Navigator(rt.config().navigation);
    unreachable_ = !nav_.go_to(rt.world(), rt.world().base_station.position(), rt.config().navigation.arrival_tolerance);
    if (unreachable_) rt.emit("abort", {{"reason", "base_unreachable"}});
  }

  double detected_at_;
  double bearing_;
  double peak_;
  Navigator nav_;
  bool unreachable_ = false;
};

// ---- transport ----------------------------------------------------------------

class TransportBody final : public TaskBody {
 public:
  enum class Phase { ToPickup, Align, AwaitPlacement, ToRequester };

  TransportBody(Intent intent, std::string requester) : intent_(std::move(intent)), requester_(std::move(requester)) {}

  void start(Runtime& rt) override { go_pickup(rt); }

  std::string save() const override {
    return json{{"phase", static_cast<int>(phase_)}}.dump();
  }

  void restore(Runtime& rt, std::string_view context) override {
    phase_ = static_cast<Phase>(json::parse(context).at("phase").get<int>());
    // Anything before the delivery leg restarts from the pickup pose: the
    // robot may have been driven elsewhere while suspended.
    if (phase_ == Phase::ToRequester) go_requester(rt);
    else go_pickup(rt);
  }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    if (failure_) return outcome(OutcomeStatus::Aborted, {*failure_});
    const WorldState& w = rt.world();
    switch (phase_) {
      case Phase::ToPickup:
      case Phase::ToRequester: {
        BaseCommand cmd;
        const auto st = nav_.update(w, cmd);
        if (st == Navigator::Status::Failed) {
          const std::string why = phase_ == Phase::ToPickup ? "pickup_unreachable" : "requester_unreachable";
          rt.emit("abort", {{"reason", why}});
          return outcome(OutcomeStatus::Aborted, {why});
        }
        if (st != Navigator::Status::Arrived) {
          rt.command_base(cmd.v, cmd.w);
          return std::nullopt;
        }
        rt.command_base(0.0, 0.0);
        if (phase_ == Phase::ToRequester) {
          rt.emit("delivery", {{"item", intent_.item.value_or("")},
                               {"requester", requester_},
                               {"parameters", intent_.parameters},
                               {"weight", reading_.weight}});
          rt.say("Here is your " + intent_.item.value_or("order") + ".", requester_);
          return outcome(OutcomeStatus::Success, {});
        }
        phase_ = Phase::Align;
        return std::nullopt;
      }
      case Phase::Align:
        if (turn_towards(rt, normalize_angle(rt.config().transport.pickup.theta - w.robot.theta))) {
          phase_ = Phase::AwaitPlacement;
          wait_started_ = rt.time();
          rt.emit("awaiting_placement", {{"item", intent_.item.value_or("")}});
          rt.say("Please put the " + intent_.item.value_or("item") + " on my table.");
        }
        return std::nullopt;
      case Phase::AwaitPlacement:
        return await_placement(rt);
    }
    return std::nullopt;
  }

 private:
  std::optional<ScenarioOutcome> await_placement(Runtime& rt) {
    rt.command_base(0.0, 0.0);
    const TableReading reading = analyze_table(read_tactile(rt.world()), rt.config().tactile);
    if (!reading.present) {
      if (rt.time() - wait_started_ >= rt.config().transport.placement_timeout - 1e-9) {
        rt.emit("abort", {{"reason", "placement_timeout"}});
        return outcome(OutcomeStatus::Aborted, {"placement_timeout"});
      }
      return std::nullopt;
    }
    reading_ = reading;
    rt.emit("table_reading", {{"class", to_string(reading.object_class)},
                              {"weight", reading.weight},
                              {"centroid", {reading.centroid_row, reading.centroid_col}},
                              {"edge", reading.edge_flag},
                              {"iou", reading.class_iou}});
    const auto& profiles = rt.config().payload_profiles;
    auto it = intent_.item ? profiles.find(*intent_.item) : profiles.end();
    if (it == profiles.end()) {
      const std::string why = "no_payload_profile";
      rt.emit("abort", {{"reason", why}, {"item", intent_.item.value_or("")}});
      return outcome(OutcomeStatus::Aborted, {why});
    }
    const VerificationResult vr = verify_payload(reading, it->second);
    if (vr.ok()) {
      phase_ = Phase::ToRequester;
      go_requester(rt);
      return std::nullopt;
    }
    std::vector<std::string> issues;
    for (PayloadIssue i : vr.issues) issues.emplace_back(to_string(i));
    rt.emit("anomaly_report", {{"item", *intent_.item}, {"issues", issues}, {"requester", requester_}});
    std::string text = "There is a problem with the " + *intent_.item + ":";
    for (const auto& s : issues) text += " " + s;
    rt.say(text, requester_);
    return outcome(OutcomeStatus::Anomaly, issues);
  }

  void go_pickup(Runtime& rt) {
    failure_.reset();
    phase_ = Phase::ToPickup;
    nav_ = Navigator(rt.config().navigation);
    if (!nav_.go_to(rt.world(), rt.config().transport.pickup.position(), rt.config().navigation.arrival_tolerance))
      fail(rt, "pickup_unreachable");
  }

  void go_requester(Runtime& rt) {
    failure_.reset();
    const Person* p = rt.world().find_person(requester_);
    if (!p) return fail(rt, "unknown_requester");
    const auto spot = approach_point(rt.world(), p->position, rt.world().robot.position(),
                                     rt.config().dialogue.approach_distance);
    nav_ = Navigator(rt.config().navigation);
    if (!spot || !nav_.go_to(rt.world(), *spot, rt.config().navigation.arrival_tolerance))
      fail(rt, "requester_unreachable");
  }

  void fail(Runtime& rt, const std::string& why) {
    failure_ = why;
    rt.emit("abort", {{"reason", why}});
  }

  Intent intent_;
  std::string requester_;
  Phase phase_ = Phase::ToPickup;
  Navigator nav_;
  double wait_started_ = 0.0;
  TableReading reading_;
  std::optional<std::string> failure_;
};

// ---- fall response ------------------------------------------------------------

class FallResponseBody final : public TaskBody {
 public:
  enum class Phase { Approach, Face, AwaitReply };

  explicit FallResponseBody(std::string person) : person_(std::move(person)) {}

  void start(Runtime& rt) override { approach(rt); }

  std::string save() const override {
    return json{{"phase", static_cast<int>(phase_)}, {"asked_at", asked_at_}}.dump();
  }

  void restore(Runtime& rt, std::string_view context) override {
    const json j = json::parse(context);
    phase_ = static_cast<Phase>(j.at("phase").get<int>());
    asked_at_ = j.at("asked_at").get<double>();
    if (phase_ != Phase::AwaitReply) approach(rt);
  }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    if (unreachable_) return alert(rt, OutcomeStatus::Aborted, "person_unreachable");
    const Person* p = rt.world().find_person(person_);
    if (!p) return alert(rt, OutcomeStatus::Aborted, "person_unknown");

    switch (phase_) {
      case Phase::Approach: {
        BaseCommand cmd;
        const auto st = nav_.update(rt.world(), cmd);
        if (st == Navigator::Status::Failed) return alert(rt, OutcomeStatus::Aborted, "person_unreachable");
        if (st == Navigator::Status::Arrived) phase_ = Phase::Face;
        else rt.command_base(cmd.v, cmd.w);
        return std::nullopt;
      }
      case Phase::Face:
        if (turn_towards(rt, bearing_to(rt.world(), p->position), 0.1)) {
          rt.command_head(0.0, 0.0);
          rt.ask_person(person_, "Are you okay? Do you need help?");
          asked_at_ = rt.time();
          phase_ = Phase::AwaitReply;
        }
        return std::nullopt;
      case Phase::AwaitReply:
        rt.command_base(0.0, 0.0);
        if (auto u = rt.take_speech(person_)) {
          rt.close_question(person_);
          rt.emit("person_ok", {{"person", person_}, {"text", u->text}});
          return outcome(OutcomeStatus::Success, {});
        }
        if (rt.time() - asked_at_ >= rt.config().fall_response.response_timeout - 1e-9)
          return alert(rt, OutcomeStatus::Anomaly, "response_timeout");
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  void approach(Runtime& rt) {
    phase_ = Phase::Approach;
    unreachable_ = false;
    nav_ = Navigator(rt.config().navigation);
    const Person* p = rt.world().find_person(person_);
    if (!p) return;
    const auto spot = approach_point(rt.world(), p->position, rt.world().robot.position(),
                                     rt.config().fall_response.approach_distance);
    unreachable_ = !spot || !nav_.go_to(rt.world(), *spot, rt.config().navigation.arrival_tolerance);
  }

  ScenarioOutcome alert(Runtime& rt, OutcomeStatus status, const std::string& why) {
    rt.close_question(person_);
    rt.command_base(0.0, 0.0);
    rt.emit("alert", {{"person", person_}, {"reason", why}});
    rt.say("Alert: " + person_ + " may need help.");
    return outcome(status, {why});
  }

  std::string person_;
  Phase phase_ = Phase::Approach;
  Navigator nav_;
  double asked_at_ = 0.0;
  bool unreachable_ = false;
};

// ---- goto / safety stop -------------------------------------------------------

class GoToBody final : public TaskBody {
 public:
  GoToBody(Vec2 target, std::string label) : target_(target), label_(std::move(label)) {}

  void start(Runtime& rt) override { plan(rt); }
  std::string save() const override { return "{}"; }
  void restore(Runtime& rt, std::string_view) override { plan(rt); }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    BaseCommand cmd;
    const auto st = unreachable_ ? Navigator::Status::Failed : nav_.update(rt.world(), cmd);
    if (st == Navigator::Status::Failed) {
      rt.emit("abort", {{"reason", "destination_unreachable"}, {"label", label_}});
      return outcome(OutcomeStatus::Aborted, {"destination_unreachable"});
    }
    if (st == Navigator::Status::Arrived) {
      rt.emit("arrived", {{"label", label_}});
      return outcome(OutcomeStatus::Success, {});
    }
    rt.command_base(cmd.v, cmd.w);
    return std::nullopt;
  }

 private:
  void plan(Runtime& rt) {
    nav_ = Navigator(rt.config().navigation);
    unreachable_ = !nav_.go_to(rt.world(), target_, rt.config().navigation.arrival_tolerance);
  }

  Vec2 target_;
  std::string label_;
  Navigator nav_;
  bool unreachable_ = false;
};

class SafetyStopBody final : public TaskBody {
 public:
  void start(Runtime& rt) override { rt.command_base(0.0, 0.0); }
  std::string save() const override { return "{}"; }
  void restore(Runtime& rt, std::string_view) override { rt.command_base(0.0, 0.0); }
  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    rt.command_base(0.0, 0.0);
    if (rt.estopped()) return std::nullopt;
    return outcome(OutcomeStatus::Success, {});
  }
};

// ---- listening ----------------------------------------------------------------

class ListeningBody final : public TaskBody {
 public:
  enum class Phase { Idle, Capture, Facing, Approaching, AwaitAnswer };

  void start(Runtime&) override {}

  std::string save() const override {
    json j = {{"phase", static_cast<int>(phase_)},
              {"speaker", speaker_},
              {"text", text_},
              {"attempt", attempt_},
              {"approached", approached_},
              {"intent", intent_to_json(intent_)},
              {"missing", missing_},
              {"asked_at", asked_at_}};
    return j.dump();
  }

  void restore(Runtime& rt, std::string_view context) override {
    const json j = json::parse(context);
    phase_ = static_cast<Phase>(j.at("phase").get<int>());
    speaker_ = j.at("speaker").get<std::string>();
    text_ = j.at("text").get<std::string>();
    attempt_ = j.at("attempt").get<int>();
    approached_ = j.at("approached").get<bool>();
    intent_ = intent_from_json(j.at("intent"));
    missing_ = j.at("missing").get<std::vector<std::string>>();
    asked_at_ = j.at("asked_at").get<double>();
    if (phase_ == Phase::Approaching) approach(rt);
  }

  std::optional<ScenarioOutcome> step(Runtime& rt) override {
    switch (phase_) {
      case Phase::Idle: {
        auto u = rt.take_speech();
        if (!u) return std::nullopt;
        speaker_ = u->person_id;
        text_ = u->text;
        attempt_ = 0;
        approached_ = false;
        capture(rt);
        return std::nullopt;
      }
      case Phase::Capture:
        capture(rt);
        return std::nullopt;
      case Phase::Facing:
        face(rt);
        return std::nullopt;
      case Phase::Approaching: {
        BaseCommand cmd;
        const auto st = nav_.update(rt.world(), cmd);
        if (st == Navigator::Status::Failed) {
          spoken_error(rt, "speaker_unreachable");
        } else if (st == Navigator::Status::Arrived) {
          rt.command_base(0.0, 0.0);
          phase_ = Phase::Facing;
        } else {
          rt.command_base(cmd.v, cmd.w);
        }
        return std::nullopt;
      }
      case Phase::AwaitAnswer:
        await_answer(rt);
        return std::nullopt;
    }
    return std::nullopt;
  }

 private:
  const Person* speaker(Runtime& rt) {
    const Person* p = rt.world().find_person(speaker_);
    if (!p) {
      rt.emit("speaker_lost", {{"speaker", speaker_}});
      phase_ = Phase::Idle;
    }
    return p;
  }

  void capture(Runtime& rt) {
    const Person* p = speaker(rt);
    if (!p) return;
    const MicSample s = capture_speech(rt.world(), *p, text_, rt.config().microphone);
    const double c = fuse_confidence(s);
    const auto& policy = rt.config().dialogue.policy;
    const ClarificationAction action = clarification_policy(c, attempt_, policy);
    rt.emit("heard", {{"speaker", speaker_},
                      {"attempt", attempt_},
                      {"omni", s.omni_score},
                      {"directional", s.dir_score},
                      {"confidence", c},
                      {"distance", s.speaker_distance},
                      {"action", to_string(action)}});

    if (action == ClarificationAction::Accept) {
      // The intelligibility score is the chance the words came through intact.
      const bool intact = rt.uniform() < c;
      UnderstandResult r = rt.understand(intact ? std::string_view(text_) : std::string_view());
      Intent intent = r.intent;
      intent.confidence = c;
      if (intent.kind != IntentKind::Unknown) return resolve(rt, std::move(intent));
      if (attempt_ >= policy.attempt_cap) return spoken_error(rt, "not_understood");
      ask_repeat(rt);
      return;
    }
    if (attempt_ >= policy.attempt_cap) return spoken_error(rt, "not_understood");
    if (action == ClarificationAction::AskRepeat) {
      ask_repeat(rt);
      return;
    }
    ++attempt_;
    approached_ = true;
    rt.say("Let me come closer.", speaker_);
    approach(rt);
  }

  // Asks for a repeat and improves the next capture: turn the directional
  // microphone towards the speaker if it is off axis, otherwise walk closer.
  void ask_repeat(Runtime& rt) {
    ++attempt_;
    rt.say("Sorry, could you repeat that?", speaker_);
    const Person* p = speaker(rt);
    if (!p) return;
    const WorldState& w = rt.world();
    const double off_axis = std::abs(normalize_angle(bearing_to(w, p->position) - w.head.pan));
    const double d = distance(w.robot.position(), p->position);
    if (off_axis <= kOnAxis && d > rt.config().dialogue.approach_distance + kCloseEnough) {
      approached_ = true;
      approach(rt);
      return;
    }
    // The simulated speaker repeats the same words.
    phase_ = Phase::Facing;
  }

  void approach(Runtime& rt) {
    const Person* p = speaker(rt);
    if (!p) return;
    phase_ = Phase::Approaching;
    rt.emit("approach_speaker", {{"speaker", speaker_}, {"attempt", attempt_}});
    const auto spot = approach_point(rt.world(), p->position, rt.world().robot.position(),
                                     rt.config().dialogue.approach_distance);
    nav_ = Navigator(rt.config().navigation);
    if (!spot || !nav_.go_to(rt.world(), *spot, rt.config().navigation.arrival_tolerance))
      spoken_error(rt, "speaker_unreachable");
  }

  void face(Runtime& rt) {
    const Person* p = speaker(rt);
    if (!p) return;
    const auto& lim = rt.world().limits;
    const double b = bearing_to(rt.world(), p->position);
    const double reach = std::min(std::abs(lim.pan_min), std::abs(lim.pan_max)) - 0.05;
    if (std::abs(b) <= reach) {
      rt.command_base(0.0, 0.0);
      rt.command_head(b, 0.0);
      phase_ = Phase::Capture;
      return;
    }
    rt.command_head(0.0, 0.0);
    turn_towards(rt, b, 0.0);
  }

  void resolve(Runtime& rt, Intent intent) {
    intent_ = std::move(intent);
    ParameterMemory& mem = rt.memory();
    if (intent_.kind == IntentKind::Fetch) {
      for (const auto& [key, value] : intent_.parameters) {
        mem.learn(intent_.kind, intent_.item, key);
        mem.remember_value(key, value);
      }
    }
    const auto missing = missing_parameters(intent_, mem);
    missing_.assign(missing.begin(), missing.end());
    next_question(rt);
  }

  void next_question(Runtime& rt) {
    if (missing_.empty()) return dispatch(rt);
    const std::string& key = missing_.front();
    rt.say("How much " + key + " would you like with your " + intent_.item.value_or("order") + "?", speaker_);
    rt.emit("parameter_question", {{"speaker", speaker_}, {"key", key}});
    asked_at_ = rt.time();
    phase_ = Phase::AwaitAnswer;
  }

  void await_answer(Runtime& rt) {
    const std::string key = missing_.front();
    std::optional<std::string> value;
    if (auto u = rt.take_speech(speaker_)) {
      value = parse_parameter_answer(u->text);
      if (!value) value = rt.memory().last_value(key);
    } else if (rt.time() - asked_at_ >= rt.config().dialogue.answer_timeout - 1e-9) {
      value = rt.memory().last_value(key);
      rt.emit("parameter_default", {{"key", key}, {"value", value.value_or("")}});
    } else {
      return;
    }
    if (value) {
      intent_.parameters[key] = *value;
      rt.memory().remember_value(key, *value);
    }
    missing_.erase(missing_.begin());
    next_question(rt);
  }

  void dispatch(Runtime& rt) {
    phase_ = Phase::Idle;
    rt.emit("intent_accepted", {{"speaker", speaker_},
                                {"intent", intent_to_json(intent_)},
                                {"attempts", attempt_ + 1},
                                {"approached", approached_}});
    const auto& cfg = rt.config();
    if (cfg.dialogue.persist_memory && !cfg.dialogue.memory_file.empty()) rt.memory().save(cfg.dialogue.memory_file);

    switch (intent_.kind) {
      case IntentKind::Fetch:
        rt.submit_transport(intent_, speaker_);
        break;
      case IntentKind::Patrol:
        rt.submit_patrol();
        break;
      case IntentKind::Help:
        rt.submit_fall_response(speaker_, "help_request");
        break;
      case IntentKind::Stop:
        for (const TaskRecord& t : rt.tasker().tasks()) {
          if (t.id != rt.listener()) rt.cancel(t.id);
        }
        rt.command_base(0.0, 0.0);
        break;
      case IntentKind::GoTo: {
        auto it = intent_.parameters.find("destination");
        const std::string dest = it == intent_.parameters.end() ? std::string() : it->second;
        std::optional<Vec2> target;
        if (dest == "base") {
          target = rt.world().base_station.position();
        } else if (dest == "speaker") {
          if (const Person* p = rt.world().find_person(speaker_))
            target = approach_point(rt.world(), p->position, rt.world().robot.position(),
                                    cfg.dialogue.approach_distance);
        } else if (auto loc = cfg.locations.find(dest); loc != cfg.locations.end()) {
          target = loc->second;
        }
        if (target) {
          rt.submit_goto(*target, dest);
        } else {
          rt.emit("spoken_error", {{"speaker", speaker_}, {"reason", "unknown_destination"}, {"destination", dest}});
          rt.say("I do not know where " + (dest.empty() ? std::string("that") : dest) + " is.", speaker_);
        }
        break;
      }
      case IntentKind::Unknown:
        break;
    }
  }

  void spoken_error(Runtime& rt, const std::string& why) {
    phase_ = Phase::Idle;
    rt.command_base(0.0, 0.0);
    rt.emit("spoken_error", {{"speaker", speaker_}, {"reason", why}, {"attempts", attempt_ + 1}});
    rt.say("I am sorry, I could not understand the command.", speaker_);
  }

  static constexpr double kOnAxis = 0.1;       // rad
  static constexpr double kCloseEnough = 0.15;  // m beyond approach distance

  Phase phase_ = Phase::Idle;
  std::string speaker_;
  std::string text_;
  int attempt_ = 0;
  bool approached_ = false;
  Intent intent_;
  std::vector<std::string> missing_;
  double asked_at_ = 0.0;
  Navigator nav_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace

std::unique_ptr<TaskBody> make_patrol_body(const PatrolConfig& cfg) { return std::make_unique<PatrolBody>(cfg); }
std::unique_ptr<TaskBody> make_hazard_report_body(double detected_at, double bearing, double peak_temperature) {
  return std::make_unique<HazardReportBody>(detected_at, bearing, peak_temperature);
}
std::unique_ptr<TaskBody> make_transport_body(const Intent& intent, const std::string& requester) {
  return std::make_unique<TransportBody>(intent, requester);
}
std::unique_ptr<TaskBody> make_fall_response_body(const std::string& person_id) {
  return std::make_unique<FallResponseBody>(person_id);
}
std::unique_ptr<TaskBody> make_goto_body(Vec2 target, const std::string& label) {
  return std::make_unique<GoToBody>(target, label);
}
std::unique_ptr<TaskBody> make_safety_stop_body() { return std::make_unique<SafetyStopBody>(); }
std::unique_ptr<TaskBody> make_listening_body() { return std::make_unique<ListeningBody>(); }

json intent_to_json(const Intent& intent) {
  json j = {{"kind", to_string(intent.kind)}, {"parameters", intent.parameters}, {"confidence", intent.confidence}};
  j["item"] = intent.item ? json(*intent.item) : json(nullptr);
  return j;
}

Intent intent_from_json(const json& j) {
  Intent i;
  i.kind = intent_kind_from_string(j.at("kind").get<std::string>()).value_or(IntentKind::Unknown);
  if (j.contains("item") && j["item"].is_string()) i.item = j["item"].get<std::string>();
  i.parameters = j.value("parameters", std::map<std::string, std::string>{});
  i.confidence = j.value("confidence", 0.0);
  return i;
}

// ---- comprehension ------------------------------------------------------------

const std::vector<std::string>& benchmark_commands() {
  static const std::vector<std::string> commands = {
      "bring me tea",          "bring me a glass of water", "please bring my medicine", "fetch the mug",
      "patrol the room",       "go to the kitchen",         "come here",                "go back to your base",
      "stop",                  "help me",
  };
  return commands;
}

ComprehensionReport run_comprehension_benchmark(const RuntimeConfig& cfg, std::uint64_t seed, int trials,
                                                double room) {
  if (trials < 0) throw std::invalid_argument("trials must be >= 0");
  if (!(room > 1.5)) throw std::invalid_argument("room must be larger than 1.5 m");
  ComprehensionReport report;
  report.seed = seed;
  report.trials = trials;
  const auto& commands = benchmark_commands();
  std::mt19937_64 layout(seed);
  const double half = room / 2.0;

  for (int k = 0; k < trials; ++k) {
    ComprehensionTrial trial;
    trial.index = k;
    const double heading = (2.0 * unit(layout) - 1.0) * std::numbers::pi;
    Vec2 speaker;
    do {
      speaker = {(2.0 * unit(layout) - 1.0) * half, (2.0 * unit(layout) - 1.0) * half};
    } while (speaker.norm() < 0.6);
    trial.command = commands[static_cast<std::size_t>(layout() % commands.size())];
    trial.distance = speaker.norm();
    trial.bearing = normalize_angle(std::atan2(speaker.y, speaker.x) - heading);

    RuntimeConfig c = cfg;
    WorldState& w = c.world;
    w.clock = 0.0;
    w.robot = {0.0, 0.0, normalize_angle(heading)};
    w.head = {};
    w.base_cmd = {};
    w.objects.clear();
    w.obstacles.clear();
    w.persons = {Person{"speaker", speaker, false, true}};
    w.pending_speech.clear();
    w.bounds = {{-half, -half}, {half, half}};
    w.base_station = {0.0, 0.0, 0.0};
    w.rng_seed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k)));
    c.events.clear();
    c.dialogue.persist_memory = false;
    c.dialogue.understander = {};
    c.locations["kitchen"] = {half - 0.5, half - 0.5};

    Runtime rt(c);
    rt.inject(Speak{"speaker", trial.command});
    std::size_t seen = 0;
    std::optional<LogEvent> verdict;
    rt.run_until(
        [&] {
          const auto& entries = rt.log().entries();
          for (; seen < entries.size(); ++seen) {
            if (entries[seen].kind == "intent_accepted" || entries[seen].kind == "spoken_error") {
              verdict = entries[seen];
              return true;
            }
          }
          return false;
        },
        120.0);

    trial.result = "timeout";
    if (verdict) {
      const json& p = verdict->payload;
      trial.attempts = p.value("attempts", 0);
      if (verdict->kind == "intent_accepted") {
        const Intent got = intent_from_json(p.at("intent"));
        const Intent expected = parse(trial.command);
        trial.result = "accepted";
        trial.approached = p.value("approached", false);
        trial.dispatched_kind = to_string(got.kind);
        trial.correct = got.kind == expected.kind && got.item == expected.item;
      } else {
        trial.result = "spoken_error";
      }
    }
    if (trial.correct) ++report.successes;
    report.per_trial.push_back(std::move(trial));
  }
  report.success_rate = trials > 0 ? static_cast<double>(report.successes) / trials : 0.0;
  return report;
}

json to_json(const ComprehensionReport& r) {
  json trials = json::array();
  for (const auto& t : r.per_trial) {
    trials.push_back({{"index", t.index},
                      {"command", t.command},
                      {"distance", t.distance},
                      {"bearing", t.bearing},
                      {"correct", t.correct},
                      {"attempts", t.attempts},
                      {"approached", t.approached},
                      {"result", t.result},
                      {"dispatched_kind", t.dispatched_kind}});
  }
  return {{"seed", r.seed},
          {"trials", r.trials},
          {"successes", r.successes},
          {"success_rate", r.success_rate},
          {"per_trial", std::move(trials)}};
}

// ---- headless -----------------------------------------------------------------

ScenarioRun run_scenario(const RuntimeConfig& cfg, const std::string& scenario, std::uint64_t seed, double duration,
                         int comprehension_trials) {
  ScenarioRun run;
  run.scenario = scenario;
  run.seed = seed;

  if (scenario == "comprehension") {
    run.comprehension = run_comprehension_benchmark(cfg, seed, comprehension_trials);
    run.outcome = "success";
    return run;
  }

  RuntimeConfig c = cfg;
  c.world.rng_seed = seed;
  Runtime rt(c);
  if (scenario == "patrol" || scenario == "fall") {
    rt.submit_patrol();
  } else if (scenario == "transport") {
    Intent intent = parse(c.transport.command);
    if (intent.kind != IntentKind::Fetch)
      throw std::invalid_argument("transport command is not a fetch request: " + c.transport.command);
    rt.submit_transport(intent, c.transport.requester);
  } else if (scenario != "idle") {
    throw std::invalid_argument("unknown scenario: " + scenario);
  }

  const double limit = duration > 0.0 ? duration : c.budget;
  const bool done = rt.run_until([&] { return rt.quiescent(); }, limit);

  run.sim_time = rt.time();
  run.outcomes = rt.outcomes();
  run.hazards = rt.hazard_reports();
  run.hazard_reported = !run.hazards.empty();
  run.events = rt.log().entries();
  run.trace = rt.tasker().trace();

  OutcomeStatus worst = OutcomeStatus::Success;
  for (const auto& o : run.outcomes) {
    if (o.status == OutcomeStatus::Aborted) worst = OutcomeStatus::Aborted;
    else if (o.status == OutcomeStatus::Anomaly && worst == OutcomeStatus::Success) worst = OutcomeStatus::Anomaly;
    run.reasons.insert(run.reasons.end(), o.reasons.begin(), o.reasons.end());
  }
  run.outcome = done ? to_string(worst) : (worst == OutcomeStatus::Aborted ? "aborted" : "incomplete");
  return run;
}

json metrics_json(const ScenarioRun& run, const std::string& event_log_path) {
  json hazards = json::array();
  for (const auto& h : run.hazards) {
    hazards.push_back({{"detected_at", h.detected_at},
                       {"bearing", h.bearing},
                       {"peak_temperature", h.peak_temperature},
                       {"reported_at_base", h.reported_at_base},
                       {"reported_at", h.reported_at},
                       {"distance_to_base", h.distance_to_base}});
  }
  json tasks = json::array();
  for (const auto& o : run.outcomes) {
    tasks.push_back({{"task", o.task.value},
                     {"name", o.task_name},
                     {"status", to_string(o.status)},
                     {"reasons", o.reasons},
                     {"finished_at", o.finished_at}});
  }
  json m = {{"scenario", run.scenario},
            {"seed", run.seed},
            {"outcome", run.outcome},
            {"reasons", run.reasons},
            {"hazard_reported", run.hazard_reported},
            {"hazards", std::move(hazards)},
            {"tasks", std::move(tasks)},
            {"sim_time", run.sim_time},
            {"event_count", run.events.size()},
            {"event_log", event_log_path.empty() ? json(nullptr) : json(event_log_path)}};
  m["comprehension"] = run.comprehension ? to_json(*run.comprehension) : json(nullptr);
  return m;
}

}  // namespace rico
