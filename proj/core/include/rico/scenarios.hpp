#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rico/runtime.hpp"

namespace rico {

// Task bodies. The runtime owns them; tests build them directly only to
// exercise save/restore.
std::unique_ptr<TaskBody> make_patrol_body(const PatrolConfig& cfg);
std::unique_ptr<TaskBody> make_hazard_report_body(double detected_at, double bearing, double peak_temperature);
std::unique_ptr<TaskBody> make_transport_body(const Intent& intent, const std::string& requester);
std::unique_ptr<TaskBody> make_fall_response_body(const std::string& person_id);
std::unique_ptr<TaskBody> make_goto_body(Vec2 target, const std::string& label);
std::unique_ptr<TaskBody> make_safety_stop_body();
std::unique_ptr<TaskBody> make_listening_body();

nlohmann::json intent_to_json(const Intent& intent);
Intent intent_from_json(const nlohmann::json& j);

// ---- comprehension Monte Carlo ----------------------------------------------

struct ComprehensionTrial {
  int index = 0;
  std::string command;
  double distance = 0.0;
  double bearing = 0.0;  // speaker bearing relative to the initial heading
  bool correct = false;
  int attempts = 0;
  bool approached = false;
  std::string result;  // "accepted", "spoken_error" or "timeout"
  std::string dispatched_kind;
  friend bool operator==(const ComprehensionTrial&, const ComprehensionTrial&) = default;
};

struct ComprehensionReport {
  std::uint64_t seed = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::vector<ComprehensionTrial> per_trial;
};

/// The command set spoken in benchmark trials.
const std::vector<std::string>& benchmark_commands();

/// Runs `trials` independent listening episodes: robot at the origin of a
/// `room` x `room` square with a random heading, one speaker placed uniformly
/// in the room (at least 0.6 m away) saying a random command. A trial counts
/// when the dispatched intent kind and item equal parse() of the command.
ComprehensionReport run_comprehension_benchmark(const RuntimeConfig& cfg, std::uint64_t seed, int trials,
                                                double room = 6.0);

nlohmann::json to_json(const ComprehensionReport& report);

// ---- headless runs ------------------------------------------------------------

struct ScenarioRun {
  std::string scenario;
  std::uint64_t seed = 0;
  // success, anomaly or aborted once every task finished; "incomplete" when
  // the time limit ran out first.
  std::string outcome;
  std::vector<std::string> reasons;
  bool hazard_reported = false;
  std::vector<HazardReport> hazards;
  std::vector<LogEvent> events;
  std::vector<ScenarioOutcome> outcomes;
  std::vector<TraceRecord> trace;
  double sim_time = 0.0;
  std::optional<ComprehensionReport> comprehension;
};

/// Runs one named scenario (patrol, transport, fall, comprehension) to
/// completion or until `duration` sim seconds (budget from config when <= 0).
/// Throws std::invalid_argument for an unknown scenario name.
ScenarioRun run_scenario(const RuntimeConfig& cfg, const std::string& scenario, std::uint64_t seed,
                         double duration = 0.0, int comprehension_trials = 1000);

/// Metrics document without wall-clock fields.
nlohmann::json metrics_json(const ScenarioRun& run, const std::string& event_log_path = {});

}  // namespace rico
