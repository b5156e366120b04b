#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "rico/microphone.hpp"

namespace rico {

enum class IntentKind { Fetch, Patrol, GoTo, Stop, Help, Unknown };

const char* to_string(IntentKind k);
std::optional<IntentKind> intent_kind_from_string(std::string_view s);  // case-insensitive

struct Intent {
  IntentKind kind = IntentKind::Unknown;
  std::optional<std::string> item;
  std::map<std::string, std::string> parameters;
  double confidence = 0.0;

  friend bool operator==(const Intent&, const Intent&) = default;
};

/// Deterministic pattern grammar over the lowercased, punctuation-stripped
/// transcript. The grammar is documented in docs/grammar.md.
Intent parse(std::string_view transcript);

/// Lowercases and replaces every non-alphanumeric byte with a space, then
/// collapses whitespace.
std::string normalize_transcript(std::string_view transcript);

/// Best single-word answer to a parameter question ("two" -> "2").
std::optional<std::string> parse_parameter_answer(std::string_view transcript);

double fuse_confidence(const MicSample& sample);

enum class ClarificationAction { Accept, AskRepeat, ApproachSpeaker };

const char* to_string(ClarificationAction a);

struct ClarificationPolicy {
  double accept_threshold = 0.7;
  double repeat_threshold = 0.4;
  int attempt_cap = 2;  // from this attempt on, anything >= repeat_threshold is accepted
};

/// Throws std::invalid_argument for a negative attempt.
ClarificationAction clarification_policy(double confidence, int attempt, const ClarificationPolicy& policy = {});

/// Learned per-(kind, item) parameter keys plus the last value used for each
/// key. Keys are only ever added.
class ParameterMemory {
 public:
  void learn(IntentKind kind, const std::optional<std::string>& item, const std::string& key);
  std::set<std::string> required(IntentKind kind, const std::optional<std::string>& item) const;

  void remember_value(const std::string& key, const std::string& value);
  std::optional<std::string> last_value(const std::string& key) const;

  std::size_t size() const;
  std::string to_json() const;
  static ParameterMemory from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  /// Missing file yields an empty memory.
  static ParameterMemory load(const std::filesystem::path& path);

  friend bool operator==(const ParameterMemory&, const ParameterMemory&) = default;

 private:
  static std::string slot(IntentKind kind, const std::optional<std::string>& item);

  std::map<std::string, std::set<std::string>> required_;
  std::map<std::string, std::string> values_last_used_;
};

/// Throws std::invalid_argument for an empty key.
ParameterMemory learn_parameter(ParameterMemory memory, IntentKind kind, const std::optional<std::string>& item,
                                const std::string& key);

/// Required keys for (kind, item) that the intent does not carry.
std::set<std::string> missing_parameters(const Intent& intent, const ParameterMemory& memory);

// ---- remote understander ---------------------------------------------------

struct UnderstanderConfig {
  std::string url;  // http://host[:port][/path]; empty disables the client
  std::string api_key;
  double timeout_s = 2.0;

  /// RICO_UNDERSTANDER_URL, RICO_UNDERSTANDER_KEY, RICO_UNDERSTANDER_TIMEOUT.
  static UnderstanderConfig from_env();
};

struct UnderstandResult {
  Intent intent;
  bool fallback = false;
  std::string warning;  // set when a configured endpoint failed
};

/// POSTs {"transcript": ...} to the configured endpoint and maps the reply
/// {"kind", "item", "parameters"} to an Intent. Any failure (unset endpoint,
/// timeout, transport error, bad status, malformed body) returns parse()
/// with `fallback` set. Never throws.
UnderstandResult external_understand(std::string_view transcript, double timeout_s, const UnderstanderConfig& cfg);

/// Decodes a reply body; nullopt when malformed.
std::optional<Intent> intent_from_reply(std::string_view body);

}  // namespace rico
