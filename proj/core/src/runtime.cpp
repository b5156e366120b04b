#include "rico/runtime.hpp"

#include <algorithm>
#include <cmath>

#include "rico/scenarios.hpp"

namespace rico {

const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::Success: return "success";
    case OutcomeStatus::Anomaly: return "anomaly";
    case OutcomeStatus::Aborted: return "aborted";
  }
  return "aborted";
}

Runtime::Runtime(RuntimeConfig cfg)
    : cfg_(std::move(cfg)), world_(cfg_.world), rng_(cfg_.world.rng_seed) {
  if (!(cfg_.dt > 0.0 && cfg_.dt <= 0.1)) throw WorldError("dt must lie in (0, 0.1]");
  if (cfg_.dialogue.persist_memory && !cfg_.dialogue.memory_file.empty())
    memory_ = ParameterMemory::load(cfg_.dialogue.memory_file);
  schedule_ = cfg_.events;
  std::stable_sort(schedule_.begin(), schedule_.end(),
                   [](const ScheduledEvent& a, const ScheduledEvent& b) { return a.at < b.at; });
  tasker_.set_clock(world_.clock);
  listener_ = submit_body("listening", cfg_.priorities.idle, make_listening_body());
}

Runtime::~Runtime() = default;

const ScenarioOutcome* Runtime::outcome(TaskId id) const {
  for (const auto& o : outcomes_)
    if (o.task == id) return &o;
  return nullptr;
}

bool Runtime::quiescent() const {
  if (events_pending() || tasker_.pending() != 0) return false;
  auto active = tasker_.executing();
  return !active || *active == listener_;
}

void Runtime::tick() {
  while (next_scheduled_ < schedule_.size() && schedule_[next_scheduled_].at <= world_.clock + 1e-9) {
    const WorldEvent& ev = schedule_[next_scheduled_++].event;
    try {
      inject(ev);
    } catch (const WorldError& e) {
      emit("event_error", {{"event", event_kind(ev)}, {"reason", e.what()}});
    }
  }
  simulate_persons();

  for (const Person& p : world_.persons) {
    if (p.fallen && falls_handled_.insert(p.id).second) submit_fall_response(p.id);
  }

  tasker_.set_clock(world_.clock);
  apply(tasker_.harmonise());

  if (auto id = tasker_.executing()) {
    TaskBody& body = *bodies_.at(id->value);
    current_ = id;
    auto out = body.step(*this);
    current_.reset();
    if (out) finish(*id, std::move(*out));
  }

  if (estop_) world_.base_cmd = {};
  world_ = step(world_, cfg_.dt);
}

void Runtime::run_for(double seconds) {
  const double end = world_.clock + seconds;
  while (world_.clock < end - 1e-9) tick();
}

void Runtime::inject(const WorldEvent& event) {
  world_ = inject_event(world_, event);
  nlohmann::json payload = {{"event", event_kind(event)}};
  if (const auto* s = std::get_if<Speak>(&event)) {
    payload["person"] = s->person_id;
    payload["text"] = s->text;
  } else if (const auto* f = std::get_if<PersonFall>(&event)) {
    payload["person"] = f->person_id;
  } else if (const auto* r = std::get_if<PersonRespond>(&event)) {
    payload["person"] = r->person_id;
    payload["responsive"] = r->responsive;
  } else if (const auto* p = std::get_if<PlaceObject>(&event)) {
    payload["object"] = p->object.id;
  } else if (const auto* rm = std::get_if<RemoveObject>(&event)) {
    payload["object"] = rm->object_id;
  }
  log_.emit(world_.clock, "world_event", std::move(payload));
}

void Runtime::schedule(double at, WorldEvent event) {
  ScheduledEvent se{at, std::move(event)};
  auto pos = std::upper_bound(schedule_.begin() + static_cast<std::ptrdiff_t>(next_scheduled_), schedule_.end(), se,
                              [](const ScheduledEvent& a, const ScheduledEvent& b) { return a.at < b.at; });
  schedule_.insert(pos, std::move(se));
}

void Runtime::teleop_base(double v, double w) {
  if (estop_) return;
  world_ = rico::command_base(world_, v, w);
}

void Runtime::teleop_head(double pan, double tilt) {
  if (estop_) return;
  world_ = rico::command_head(world_, pan, tilt);
}

void Runtime::set_estop(bool engaged) {
  if (engaged == estop_) return;
  estop_ = engaged;
  if (engaged) {
    world_.base_cmd = {};
    log_.emit(world_.clock, "estop", {{"engaged", true}});
    const bool running = safety_task_ && tasker_.contains(*safety_task_) &&
                         (tasker_.record(*safety_task_).state != TaskState::Finished &&
                          tasker_.record(*safety_task_).state != TaskState::Terminated);
    if (!running) safety_task_ = submit_body("safety_stop", cfg_.priorities.safety_stop, make_safety_stop_body());
  } else {
    log_.emit(world_.clock, "estop", {{"engaged", false}});
  }
}

TaskId Runtime::submit_body(std::string name, std::int64_t priority, std::unique_ptr<TaskBody> body,
                            nlohmann::json details) {
  tasker_.set_clock(world_.clock);
  const TaskId id = tasker_.submit(name, priority);
  bodies_.emplace(id.value, std::move(body));
  details["task"] = id.value;
  details["name"] = name;
  details["priority"] = priority;
  log_.emit(world_.clock, "task_submitted", std::move(details));
  return id;
}

TaskId Runtime::submit_patrol() {
  return submit_body("patrol", cfg_.priorities.patrol, make_patrol_body(cfg_.patrol));
}

TaskId Runtime::submit_transport(const Intent& intent, const std::string& requester) {
  return submit_body("transport", cfg_.priorities.transport, make_transport_body(intent, requester),
                     {{"intent", intent_to_json(intent)}, {"requester", requester}});
}

TaskId Runtime::submit_fall_response(const std::string& person_id, std::string reason) {
  return submit_body("fall_response", cfg_.priorities.fall_response, make_fall_response_body(person_id),
                     {{"person", person_id}, {"reason", std::move(reason)}});
}

TaskId Runtime::submit_goto(Vec2 target, std::string label) {
  return submit_body("goto", cfg_.priorities.go_to, make_goto_body(target, label),
                     {{"target", {target.x, target.y}}, {"label", label}});
}

TaskId Runtime::submit_hazard_report(double detected_at, double bearing, double peak_temperature) {
  return submit_body("hazard_report", cfg_.priorities.hazard_report,
                     make_hazard_report_body(detected_at, bearing, peak_temperature),
                     {{"peak_temperature", peak_temperature}, {"bearing", bearing}});
}

bool Runtime::cancel(TaskId id) {
  if (!tasker_.contains(id)) return false;
  const TaskState s = tasker_.record(id).state;
  if (s == TaskState::Finished || s == TaskState::Terminated) return false;
  const bool was_active = s == TaskState::Executing;
  tasker_.set_clock(world_.clock);
  const ScheduleDecision d = tasker_.terminate(id);
  if (was_active) world_.base_cmd = {};
  ScenarioOutcome out;
  out.status = OutcomeStatus::Aborted;
  out.reasons = {"terminated"};
  out.task = id;
  out.task_name = tasker_.record(id).name;
  out.finished_at = world_.clock;
  log_.emit(world_.clock, "task_terminated", {{"task", id.value}, {"name", out.task_name}});
  outcomes_.push_back(std::move(out));
  apply(d);
  return true;
}

void Runtime::apply(const ScheduleDecision& decision) {
  for (const ScheduleAction& a : decision.actions) {
    TaskBody& body = *bodies_.at(a.id.value);
    const std::string& name = tasker_.record(a.id).name;
    current_ = a.id;
    switch (a.kind) {
      case ActionKind::Suspend:
        tasker_.save_context(a.id, body.save());
        world_.base_cmd = {};
        log_.emit(world_.clock, "task_suspended", {{"task", a.id.value}, {"name", name}});
        break;
      case ActionKind::Start:
        log_.emit(world_.clock, "task_started", {{"task", a.id.value}, {"name", name}});
        body.start(*this);
        break;
      case ActionKind::Resume:
        log_.emit(world_.clock, "task_resumed", {{"task", a.id.value}, {"name", name}});
        body.restore(*this, tasker_.load_context(a.id));
        break;
    }
    current_.reset();
  }
}

void Runtime::finish(TaskId id, ScenarioOutcome out) {
  out.task = id;
  out.task_name = tasker_.record(id).name;
  out.finished_at = world_.clock;
  for (const LogEvent& e : log_.entries()) {
    auto it = e.payload.find("task");
    if (it != e.payload.end() && it->is_number_unsigned() && it->get<std::uint64_t>() == id.value)
      out.events.push_back(e);
  }
  world_.base_cmd = {};
  log_.emit(world_.clock, "task_finished",
            {{"task", id.value}, {"name", out.task_name}, {"status", to_string(out.status)}, {"reasons", out.reasons}});
  outcomes_.push_back(std::move(out));
  tasker_.set_clock(world_.clock);
  apply(tasker_.complete(id));
}

void Runtime::simulate_persons() {
  for (auto it = replies_.begin(); it != replies_.end();) {
    const Person* p = world_.find_person(it->person_id);
    if (!p) {
      it = replies_.erase(it);
      continue;
    }
    if (world_.clock + 1e-9 >= it->due && p->responsive) {
      inject(Speak{p->id, "i am okay"});
      it = replies_.erase(it);
      continue;
    }
    ++it;
  }
}

void Runtime::command_base(double v, double w) {
  if (estop_) {
    world_.base_cmd = {};
    return;
  }
  world_ = rico::command_base(world_, v, w);
}

void Runtime::command_head(double pan, double tilt) { world_ = rico::command_head(world_, pan, tilt); }

const LogEvent& Runtime::emit(std::string kind, nlohmann::json payload) {
  if (current_ && !payload.contains("task")) payload["task"] = current_->value;
  return log_.emit(world_.clock, std::move(kind), std::move(payload));
}

void Runtime::say(const std::string& text, const std::string& to) {
  nlohmann::json payload = {{"text", text}};
  if (!to.empty()) payload["to"] = to;
  emit("say", std::move(payload));
}

void Runtime::ask_person(const std::string& person_id, const std::string& question) {
  say(question, person_id);
  close_question(person_id);
  replies_.push_back({person_id, world_.clock + cfg_.fall_response.reply_delay});
}

void Runtime::close_question(const std::string& person_id) {
  std::erase_if(replies_, [&](const PendingReply& r) { return r.person_id == person_id; });
}

std::optional<Utterance> Runtime::take_speech(const std::optional<std::string>& from) {
  auto& q = world_.pending_speech;
  auto it = std::find_if(q.begin(), q.end(), [&](const Utterance& u) { return !from || u.person_id == *from; });
  if (it == q.end()) return std::nullopt;
  Utterance u = std::move(*it);
  q.erase(it);
  return u;
}

double Runtime::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

UnderstandResult Runtime::understand(std::string_view transcript) {
  const auto& uc = cfg_.dialogue.understander;
  if (uc.url.empty()) return {parse(transcript), true, {}};
  UnderstandResult r = external_understand(transcript, uc.timeout_s, uc);
  if (!r.warning.empty()) emit("understander_warning", {{"reason", r.warning}});
  return r;
}

void Runtime::record_hazard(const HazardReport& report) {
  hazards_.push_back(report);
  emit("hazard_report", {{"detected_at", report.detected_at},
                         {"bearing", report.bearing},
                         {"peak_temperature", report.peak_temperature},
                         {"reported_at_base", report.reported_at_base},
                         {"reported_at", report.reported_at},
                         {"distance_to_base", report.distance_to_base}});
}

}  // namespace rico
