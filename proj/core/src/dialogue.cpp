#include "rico/dialogue.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace rico {

namespace {

using Tokens = std::vector<std::string>;

struct Alias {
  std::string_view word;
  std::string_view canonical;
};

constexpr std::array kItems{
    Alias{"tea", "tea"},           Alias{"water", "water"},       Alias{"medicine", "medicine"},
    Alias{"medicines", "medicine"}, Alias{"medication", "medicine"}, Alias{"pills", "medicine"},
    Alias{"pill", "medicine"},     Alias{"mug", "mug"},           Alias{"cup", "mug"},
};

constexpr std::array kParams{
    Alias{"sugar", "sugar"}, Alias{"sugars", "sugar"}, Alias{"milk", "milk"},   Alias{"lemon", "lemon"},
    Alias{"lemons", "lemon"}, Alias{"honey", "honey"},  Alias{"ice", "ice"},
};

constexpr std::array kNumbers{
    Alias{"zero", "0"}, Alias{"one", "1"}, Alias{"two", "2"},   Alias{"three", "3"}, Alias{"four", "4"}, Alias{"five", "5"},
    Alias{"six", "6"},  Alias{"seven", "7"}, Alias{"eight", "8"}, Alias{"nine", "9"}, Alias{"ten", "10"},
};

constexpr std::array<std::string_view, 6> kHelpWords{"help", "emergency", "fallen", "fell", "hurt", "injured"};
constexpr std::array<std::string_view, 6> kStopWords{"stop", "halt", "freeze", "cancel", "abort", "enough"};
constexpr std::array<std::string_view, 4> kPatrolWords{"patrol", "patrolling", "guard", "monitor"};
constexpr std::array<std::string_view, 10> kFetchWords{"bring", "fetch", "get", "give", "deliver",
                                                       "carry", "hand", "want", "need", "like"};
constexpr std::array<std::string_view, 7> kGoWords{"go", "come", "move", "drive", "navigate", "return", "head"};
constexpr std::array<std::string_view, 5> kArticles{"the", "a", "an", "my", "your"};

template <std::size_t N>
bool any_of_words(const Tokens& t, const std::array<std::string_view, N>& words) {
  return std::any_of(t.begin(), t.end(), [&](const std::string& tok) {
    return std::find(words.begin(), words.end(), tok) != words.end();
  });
}

template <std::size_t N>
std::optional<std::string_view> lookup(const std::array<Alias, N>& table, std::string_view word) {
  for (const Alias& a : table)
    if (a.word == word) return a.canonical;
  return std::nullopt;
}

std::optional<std::string> number_value(std::string_view tok) {
  if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return std::string(tok);
  if (auto n = lookup(kNumbers, tok)) return std::string(*n);
  return std::nullopt;
}

Tokens tokenize(std::string_view transcript) {
  Tokens out;
  std::istringstream in(normalize_transcript(transcript));
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::optional<std::string> find_item(const Tokens& t) {
  // A drink or medicine wins over its container ("a cup of tea" -> tea).
  std::optional<std::string> container;
  for (const std::string& tok : t) {
    auto item = lookup(kItems, tok);
    if (!item) continue;
    if (*item == "mug") container = std::string(*item);
    else return std::string(*item);
  }
  return container;
}

std::map<std::string, std::string> find_parameters(const Tokens& t) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto key = lookup(kParams, t[i]);
    if (!key) continue;
    std::string value = "yes";
    if (i > 0) {
      if (auto n = number_value(t[i - 1])) value = *n;
      else if (t[i - 1] == "no" || t[i - 1] == "without") value = "0";
    }
    out[std::string(*key)] = value;
  }
  return out;
}

std::optional<std::string> find_destination(const Tokens& t) {
  for (const std::string& tok : t) {
    if (tok == "here" || tok == "me") return std::string("speaker");
    if (tok == "base" || tok == "home" || tok == "dock") return std::string("base");
  }
  auto to = std::find(t.begin(), t.end(), "to");
  if (to == t.end()) return std::nullopt;
  std::string dest;
  for (auto it = std::next(to); it != t.end(); ++it) {
    if (std::find(kArticles.begin(), kArticles.end(), *it) != kArticles.end()) continue;
    if (!dest.empty()) dest += '_';
    dest += *it;
  }
  if (dest.empty()) return std::nullopt;
  return dest;
}

}  // namespace

const char* to_string(IntentKind k) {
  switch (k) {
    case IntentKind::Fetch: return "Fetch";
    case IntentKind::Patrol: return "Patrol";
    case IntentKind::GoTo: return "GoTo";
    case IntentKind::Stop: return "Stop";
    case IntentKind::Help: return "Help";
    case IntentKind::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<IntentKind> intent_kind_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  lower.erase(std::remove(lower.begin(), lower.end(), '_'), lower.end());
  if (lower == "fetch") return IntentKind::Fetch;
  if (lower == "patrol") return IntentKind::Patrol;
  if (lower == "goto") return IntentKind::GoTo;
  if (lower == "stop") return IntentKind::Stop;
  if (lower == "help") return IntentKind::Help;
  if (lower == "unknown") return IntentKind::Unknown;
  return std::nullopt;
}

const char* to_string(ClarificationAction a) {
  switch (a) {
    case ClarificationAction::Accept: return "Accept";
    case ClarificationAction::AskRepeat: return "AskRepeat";
    case ClarificationAction::ApproachSpeaker: return "ApproachSpeaker";
  }
  return "?";
}

std::string normalize_transcript(std::string_view transcript) {
  std::string out;
  out.reserve(transcript.size());
  bool pending_space = false;
  for (char ch : transcript) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    } else if (c == '\'') {
      // "don't" -> "dont"
    } else {
      pending_space = true;
    }
  }
  return out;
}

Intent parse(std::string_view transcript) {
  const Tokens t = tokenize(transcript);
  Intent intent;
  const std::optional<std::string> item = find_item(t);

  if (any_of_words(t, kHelpWords)) {
    intent.kind = IntentKind::Help;
  } else if (any_of_words(t, kStopWords)) {
    intent.kind = IntentKind::Stop;
  } else if (any_of_words(t, kPatrolWords)) {
    intent.kind = IntentKind::Patrol;
  } else if (any_of_words(t, kFetchWords) || item) {
    intent.kind = IntentKind::Fetch;
    intent.item = item;
    intent.parameters = find_parameters(t);
  } else if (any_of_words(t, kGoWords)) {
    intent.kind = IntentKind::GoTo;
    if (auto dest = find_destination(t)) intent.parameters["destination"] = *dest;
  }
  intent.confidence = intent.kind == IntentKind::Unknown ? 0.0 : 1.0;
  return intent;
}

std::optional<std::string> parse_parameter_answer(std::string_view transcript) {
  const Tokens t = tokenize(transcript);
  for (const std::string& tok : t)
    if (auto n = number_value(tok)) return n;
  for (const std::string& tok : t) {
    if (tok == "no" || tok == "none" || tok == "without" || tok == "nothing") return std::string("0");
    if (tok == "yes" || tok == "please") return std::string("yes");
  }
  return std::nullopt;
}

double fuse_confidence(const MicSample& sample) { return std::max(sample.omni_score, sample.dir_score); }

ClarificationAction clarification_policy(double confidence, int attempt, const ClarificationPolicy& policy) {
  if (attempt < 0) throw std::invalid_argument("attempt must be >= 0");
  if (confidence >= policy.accept_threshold) return ClarificationAction::Accept;
  if (confidence >= policy.repeat_threshold)
    return attempt >= policy.attempt_cap ? ClarificationAction::Accept : ClarificationAction::AskRepeat;
  return ClarificationAction::ApproachSpeaker;
}

// ---- ParameterMemory -------------------------------------------------------

std::string ParameterMemory::slot(IntentKind kind, const std::optional<std::string>& item) {
  return std::string(to_string(kind)) + "/" + item.value_or("");
}

void ParameterMemory::learn(IntentKind kind, const std::optional<std::string>& item, const std::string& key) {
  if (key.empty()) throw std::invalid_argument("parameter key must not be empty");
  required_[slot(kind, item)].insert(key);
}

std::set<std::string> ParameterMemory::required(IntentKind kind, const std::optional<std::string>& item) const {
  auto it = required_.find(slot(kind, item));
  return it == required_.end() ? std::set<std::string>{} : it->second;
}

void ParameterMemory::remember_value(const std::string& key, const std::string& value) { values_last_used_[key] = value; }

std::optional<std::string> ParameterMemory::last_value(const std::string& key) const {
  auto it = values_last_used_.find(key);
  if (it == values_last_used_.end()) return std::nullopt;
  return it->second;
}

std::size_t ParameterMemory::size() const {
  std::size_t n = 0;
  for (const auto& [k, keys] : required_) n += keys.size();
  return n;
}

std::string ParameterMemory::to_json() const {
  nlohmann::json j;
  j["required"] = nlohmann::json::object();
  for (const auto& [k, keys] : required_) j["required"][k] = keys;
  j["values_last_used"] = values_last_used_;
  return j.dump(2);
}

ParameterMemory ParameterMemory::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  ParameterMemory m;
  for (const auto& [k, keys] : j.at("required").items()) m.required_[k] = keys.get<std::set<std::string>>();
  if (j.contains("values_last_used")) m.values_last_used_ = j.at("values_last_used").get<std::map<std::string, std::string>>();
  return m;
}

void ParameterMemory::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write parameter memory to " + path.string());
  out << to_json() << '\n';
}

ParameterMemory ParameterMemory::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

ParameterMemory learn_parameter(ParameterMemory memory, IntentKind kind, const std::optional<std::string>& item,
                                const std::string& key) {
  memory.learn(kind, item, key);
  return memory;
}

std::set<std::string> missing_parameters(const Intent& intent, const ParameterMemory& memory) {
  std::set<std::string> out;
  for (const std::string& key : memory.required(intent.kind, intent.item))
    if (!intent.parameters.count(key)) out.insert(key);
  return out;
}

}  // namespace rico
