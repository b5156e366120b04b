#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rico/config.hpp"
#include "rico/dialogue.hpp"
#include "rico/event_log.hpp"
#include "rico/tasker.hpp"
#include "rico/world.hpp"

namespace rico {

enum class OutcomeStatus { Success, Anomaly, Aborted };

const char* to_string(OutcomeStatus s);

struct HazardReport {
  double detected_at = 0.0;
  double bearing = 0.0;
  double peak_temperature = 0.0;
  bool reported_at_base = false;
  double reported_at = 0.0;
  double distance_to_base = 0.0;
  friend bool operator==(const HazardReport&, const HazardReport&) = default;
};

struct ScenarioOutcome {
  TaskId task;
  std::string task_name;
  OutcomeStatus status = OutcomeStatus::Success;
  std::vector<std::string> reasons;  // violations or abort reasons
  std::vector<LogEvent> events;      // entries emitted while this task ran
  double finished_at = 0.0;
};

class Runtime;

/// A scenario body driven by the runtime while the tasker has it Executing.
/// Bodies advance one tick per step() and keep their progress in a form that
/// save()/restore() can round-trip through the tasker's context store.
class TaskBody {
 public:
  virtual ~TaskBody() = default;
  virtual void start(Runtime& rt) = 0;
  virtual std::string save() const = 0;
  /// Reloads progress and replans from the current pose.
  virtual void restore(Runtime& rt, std::string_view context) = 0;
  /// Returns an outcome (status + reasons) once the task is done.
  virtual std::optional<ScenarioOutcome> step(Runtime& rt) = 0;
};

/// Everything that happens on the robot's single stepping context: the
/// world, the tasker, scenario bodies, the parameter memory and the event
/// log. Not thread-safe; the gateway talks to it through a command queue.
class Runtime {
 public:
  explicit Runtime(RuntimeConfig cfg);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const RuntimeConfig& config() const { return cfg_; }
  const WorldState& world() const { return world_; }
  double time() const { return world_.clock; }
  const Tasker& tasker() const { return tasker_; }
  const EventLog& log() const { return log_; }
  const ParameterMemory& memory() const { return memory_; }
  ParameterMemory& memory() { return memory_; }
  const std::vector<ScenarioOutcome>& outcomes() const { return outcomes_; }
  const ScenarioOutcome* outcome(TaskId id) const;
  const std::vector<HazardReport>& hazard_reports() const { return hazards_; }
  TaskId listener() const { return listener_; }
  bool events_pending() const { return next_scheduled_ < schedule_.size(); }
  /// No scheduled events left and nothing but the listener in the tasker.
  bool quiescent() const;

  /// One control period: due events, fall triggers, harmonise, the active
  /// body's step, then world integration.
  void tick();
  void run_for(double seconds);
  template <class Pred>
  bool run_until(Pred done, double max_seconds) {
    const double end = time() + max_seconds;
    while (!done()) {
      if (time() >= end - 1e-9) return false;
      tick();
    }
    return true;
  }

  // ---- external inputs ----
  /// Applies a world event now. Throws WorldError for unknown ids.
  void inject(const WorldEvent& event);
  void schedule(double at, WorldEvent event);
  void teleop_base(double v, double w);
  void teleop_head(double pan, double tilt);
  void set_estop(bool engaged);
  bool estopped() const { return estop_; }

  // ---- task submission ----
  TaskId submit_patrol();
  TaskId submit_transport(const Intent& intent, const std::string& requester);
  TaskId submit_fall_response(const std::string& person_id, std::string reason = "fall");
  TaskId submit_goto(Vec2 target, std::string label);
  TaskId submit_hazard_report(double detected_at, double bearing, double peak_temperature);
  /// Terminates a task; returns false when it was already done.
  bool cancel(TaskId id);

  // ---- services for task bodies ----
  void command_base(double v, double w);
  void command_head(double pan, double tilt);
  const LogEvent& emit(std::string kind, nlohmann::json payload = nlohmann::json::object());
  void say(const std::string& text, const std::string& to = {});
  /// Asks a person a question; responsive simulated persons answer after
  /// the configured reply delay.
  void ask_person(const std::string& person_id, const std::string& question);
  void close_question(const std::string& person_id);
  /// Removes and returns the oldest pending utterance (optionally only from
  /// one person).
  std::optional<Utterance> take_speech(const std::optional<std::string>& from = std::nullopt);
  bool has_speech() const { return !world_.pending_speech.empty(); }
  double uniform();
  UnderstandResult understand(std::string_view transcript);
  void record_hazard(const HazardReport& report);
  std::optional<TaskId> current_task() const { return current_; }

 private:
  TaskId submit_body(std::string name, std::int64_t priority, std::unique_ptr<TaskBody> body,
                     nlohmann::json details = nlohmann::json::object());
  void apply(const ScheduleDecision& decision);
  void finish(TaskId id, ScenarioOutcome outcome);
  void simulate_persons();

  struct PendingReply {
    std::string person_id;
    double due = 0.0;
  };

  RuntimeConfig cfg_;
  WorldState world_;
  Tasker tasker_;
  EventLog log_;
  ParameterMemory memory_;
  std::map<std::uint64_t, std::unique_ptr<TaskBody>> bodies_;
  std::vector<ScenarioOutcome> outcomes_;
  std::vector<HazardReport> hazards_;
  std::vector<ScheduledEvent> schedule_;
  std::size_t next_scheduled_ = 0;
  std::vector<PendingReply> replies_;
  std::set<std::string> falls_handled_;
  std::optional<TaskId> current_;
  std::optional<TaskId> safety_task_;
  TaskId listener_;
  std::mt19937_64 rng_;
  bool estop_ = false;
};

}  // namespace rico
