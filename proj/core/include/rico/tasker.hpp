#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rico {

struct TaskId {
  std::uint64_t value = 0;
  friend auto operator<=>(TaskId, TaskId) = default;
};

enum class TaskState { Waiting, Executing, Suspended, Finished, Terminated };

const char* to_string(TaskState s);

/// True when `from -> to` is one of the lifecycle edges a task may take.
bool legal_transition(TaskState from, TaskState to);

struct TaskRecord {
  TaskId id;
  std::string name;
  std::int64_t priority = 0;
  TaskState state = TaskState::Waiting;
  std::string context;  // opaque, owned by the task body
  double submitted_at = 0.0;

  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

enum class ActionKind { Start, Suspend, Resume };

const char* to_string(ActionKind k);

struct ScheduleAction {
  ActionKind kind;
  TaskId id;
  friend bool operator==(const ScheduleAction&, const ScheduleAction&) = default;
};

struct ScheduleDecision {
  std::optional<TaskId> active;
  std::vector<ScheduleAction> actions;
  friend bool operator==(const ScheduleDecision&, const ScheduleDecision&) = default;
};

/// One state change, in the order it happened. `tick` counts public
/// operations on the scheduler.
struct TraceRecord {
  std::uint64_t tick = 0;
  std::string op;
  TaskId id;
  std::optional<TaskState> before;
  TaskState after = TaskState::Waiting;
  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TaskerError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Priority harmoniser. Exactly one task controls the robot at a time; a
/// strictly higher-priority candidate preempts it, and the preempted task is
/// resumed later with its saved context. Ties go to the earliest submission,
/// then the lower id. Not thread-safe: owned by a single stepping context.
class Tasker {
 public:
  void set_clock(double seconds) { clock_ = seconds; }
  double clock() const { return clock_; }

  TaskId submit(std::string name, std::int64_t priority, std::string initial_context = {});
  ScheduleDecision harmonise();
  ScheduleDecision complete(TaskId id);
  ScheduleDecision terminate(TaskId id);

  void save_context(TaskId id, std::string context);
  const std::string& load_context(TaskId id) const;

  const TaskRecord& record(TaskId id) const;
  bool contains(TaskId id) const { return tasks_.count(id.value) != 0; }
  std::optional<TaskId> executing() const;
  /// Waiting and Suspended tasks.
  std::size_t pending() const;
  std::vector<TaskRecord> tasks() const;

  const std::vector<TraceRecord>& trace() const { return trace_; }
  /// One JSON object per line: tick, op, task, before, after.
  void write_trace(std::ostream& os) const;

 private:
  TaskRecord& mutable_record(TaskId id);
  void transition(TaskRecord& rec, TaskState to, const char* op);
  ScheduleDecision harmonise_locked();

  std::map<std::uint64_t, TaskRecord> tasks_;
  std::uint64_t next_id_ = 1;
  std::uint64_t tick_ = 0;
  double clock_ = 0.0;
  std::vector<TraceRecord> trace_;
};

}  // namespace rico
