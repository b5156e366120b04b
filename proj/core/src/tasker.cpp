#include "rico/tasker.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

namespace rico {

const char* to_string(TaskState s) {
  switch (s) {
    case TaskState::Waiting: return "Waiting";
    case TaskState::Executing: return "Executing";
    case TaskState::Suspended: return "Suspended";
    case TaskState::Finished: return "Finished";
    case TaskState::Terminated: return "Terminated";
  }
  return "?";
}

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Start: return "start";
    case ActionKind::Suspend: return "suspend";
    case ActionKind::Resume: return "resume";
  }
  return "?";
}

bool legal_transition(TaskState from, TaskState to) {
  using S = TaskState;
  switch (from) {
    case S::Waiting: return to == S::Executing || to == S::Terminated;
    case S::Executing: return to == S::Suspended || to == S::Finished || to == S::Terminated;
    case S::Suspended: return to == S::Executing || to == S::Terminated;
    case S::Finished:
    case S::Terminated: return false;
  }
  return false;
}

TaskId Tasker::submit(std::string name, std::int64_t priority, std::string initial_context) {
  ++tick_;
  const TaskId id{next_id_++};
  TaskRecord rec;
  rec.id = id;
  rec.name = std::move(name);
  rec.priority = priority;
  rec.state = TaskState::Waiting;
  rec.context = std::move(initial_context);
  rec.submitted_at = clock_;
  tasks_.emplace(id.value, std::move(rec));
  trace_.push_back({tick_, "submit", id, std::nullopt, TaskState::Waiting});
  return id;
}

ScheduleDecision Tasker::harmonise() {
  ++tick_;
  return harmonise_locked();
}

ScheduleDecision Tasker::harmonise_locked() {
  ScheduleDecision decision;
  TaskRecord* exec = nullptr;
  TaskRecord* best = nullptr;
  for (auto& [key, rec] : tasks_) {
    if (rec.state == TaskState::Executing) exec = &rec;
    if (rec.state != TaskState::Waiting && rec.state != TaskState::Suspended) continue;
    // Map iteration is in id order, so only a strictly better candidate
    // replaces the current one.
    if (!best || rec.priority > best->priority ||
        (rec.priority == best->priority && rec.submitted_at < best->submitted_at))
      best = &rec;
  }

  auto install = [&](TaskRecord& c) {
    const bool resuming = c.state == TaskState::Suspended;
    transition(c, TaskState::Executing, resuming ? "resume" : "start");
    decision.actions.push_back({resuming ? ActionKind::Resume : ActionKind::Start, c.id});
    exec = &c;
  };

  if (best) {
    if (!exec) {
      install(*best);
    } else if (best->priority > exec->priority) {
      transition(*exec, TaskState::Suspended, "suspend");
      decision.actions.push_back({ActionKind::Suspend, exec->id});
      install(*best);
    }
  }
  if (exec) decision.active = exec->id;
  return decision;
}

ScheduleDecision Tasker::complete(TaskId id) {
  TaskRecord& rec = mutable_record(id);
  if (rec.state != TaskState::Executing)
    throw TaskerError("complete: task " + std::to_string(id.value) + " is " + to_string(rec.state));
  ++tick_;
  transition(rec, TaskState::Finished, "complete");
  return harmonise_locked();
}

ScheduleDecision Tasker::terminate(TaskId id) {
  TaskRecord& rec = mutable_record(id);
  if (rec.state == TaskState::Finished || rec.state == TaskState::Terminated)
    throw TaskerError("terminate: task " + std::to_string(id.value) + " is " + to_string(rec.state));
  ++tick_;
  const bool was_executing = rec.state == TaskState::Executing;
  transition(rec, TaskState::Terminated, "terminate");
  if (was_executing) return harmonise_locked();
  ScheduleDecision d;
  d.active = executing();
  return d;
}

void Tasker::save_context(TaskId id, std::string context) { mutable_record(id).context = std::move(context); }

const std::string& Tasker::load_context(TaskId id) const { return record(id).context; }

const TaskRecord& Tasker::record(TaskId id) const {
  auto it = tasks_.find(id.value);
  if (it == tasks_.end()) throw TaskerError("unknown task " + std::to_string(id.value));
  return it->second;
}

TaskRecord& Tasker::mutable_record(TaskId id) {
  auto it = tasks_.find(id.value);
  if (it == tasks_.end()) throw TaskerError("unknown task " + std::to_string(id.value));
  return it->second;
}

std::optional<TaskId> Tasker::executing() const {
  for (const auto& [key, rec] : tasks_)
    if (rec.state == TaskState::Executing) return rec.id;
  return std::nullopt;
}

std::size_t Tasker::pending() const {
  std::size_t n = 0;
  for (const auto& [key, rec] : tasks_) n += (rec.state == TaskState::Waiting || rec.state == TaskState::Suspended);
  return n;
}

std::vector<TaskRecord> Tasker::tasks() const {
  std::vector<TaskRecord> out;
  out.reserve(tasks_.size());
  for (const auto& [key, rec] : tasks_) out.push_back(rec);
  return out;
}

void Tasker::transition(TaskRecord& rec, TaskState to, const char* op) {
  if (!legal_transition(rec.state, to))
    throw TaskerError(std::string("illegal transition ") + to_string(rec.state) + " -> " + to_string(to));
  trace_.push_back({tick_, op, rec.id, rec.state, to});
  rec.state = to;
}

void Tasker::write_trace(std::ostream& os) const {
  for (const TraceRecord& t : trace_) {
    nlohmann::json j{{"tick", t.tick}, {"op", t.op}, {"task", t.id.value}, {"after", to_string(t.after)}};
    j["before"] = t.before ? nlohmann::json(to_string(*t.before)) : nlohmann::json(nullptr);
    os << j.dump() << '\n';
  }
}

}  // namespace rico
