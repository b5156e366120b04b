#include "rico/event_log.hpp"

#include <algorithm>
#include <ostream>

namespace rico {

const LogEvent& EventLog::emit(double time, std::string kind, nlohmann::json payload) {
  entries_.push_back({time, std::move(kind), std::move(payload)});
  return entries_.back();
}

std::size_t EventLog::count(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [&](const LogEvent& e) { return e.kind == kind; }));
}

std::optional<LogEvent> EventLog::first(std::string_view kind) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const LogEvent& e) { return e.kind == kind; });
  if (it == entries_.end()) return std::nullopt;
  return *it;
}

nlohmann::json EventLog::to_json(const LogEvent& e) { return {{"t", e.time}, {"kind", e.kind}, {"payload", e.payload}}; }

void EventLog::write_jsonl(std::ostream& os) const {
  for (const LogEvent& e : entries_) os << to_json(e).dump() << '\n';
}

}  // namespace rico
