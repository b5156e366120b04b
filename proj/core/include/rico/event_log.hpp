#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rico {

struct LogEvent {
  double time = 0.0;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();
  friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

/// Append-only record of everything the robot did or observed.
class EventLog {
 public:
  const LogEvent& emit(double time, std::string kind, nlohmann::json payload = nlohmann::json::object());

  const std::vector<LogEvent>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(std::string_view kind) const;
  std::optional<LogEvent> first(std::string_view kind) const;

  /// {"t": ..., "kind": ..., "payload": {...}} per line.
  void write_jsonl(std::ostream& os) const;
  static nlohmann::json to_json(const LogEvent& e);

 private:
  std::vector<LogEvent> entries_;
};

}  // namespace rico
