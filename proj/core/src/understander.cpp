#include <cstdlib>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rico/dialogue.hpp"

namespace rico {

namespace {

struct Endpoint {
  std::string host;
  int port = 80;
  std::string path = "/";
};

std::optional<Endpoint> parse_url(const std::string& url) {
  static const std::regex re(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) return std::nullopt;
  Endpoint e;
  e.host = m[1].str();
  if (m[2].matched) e.port = std::stoi(m[2].str());
  if (m[3].matched) e.path = m[3].str();
  return e;
}

UnderstandResult fallback(std::string_view transcript, std::string warning) {
  UnderstandResult r;
  r.intent = parse(transcript);
  r.fallback = true;
  r.warning = std::move(warning);
  return r;
}

}  // namespace

UnderstanderConfig UnderstanderConfig::from_env() {
  UnderstanderConfig cfg;
  if (const char* url = std::getenv("RICO_UNDERSTANDER_URL")) cfg.url = url;
  if (const char* key = std::getenv("RICO_UNDERSTANDER_KEY")) cfg.api_key = key;
  if (const char* t = std::getenv("RICO_UNDERSTANDER_TIMEOUT")) {
    char* end = nullptr;
    const double v = std::strtod(t, &end);
    if (end != t && v > 0.0) cfg.timeout_s = v;
  }
  return cfg;
}

std::optional<Intent> intent_from_reply(std::string_view body) {
  const auto j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) return std::nullopt;
  const auto kind = intent_kind_from_string(j["kind"].get<std::string>());
  if (!kind) return std::nullopt;
  Intent intent;
  intent.kind = *kind;
  intent.confidence = 1.0;
  if (intent.kind == IntentKind::Unknown) {
    intent.confidence = 0.0;
    return intent;
  }
  if (j.contains("item") && !j["item"].is_null()) {
    if (!j["item"].is_string()) return std::nullopt;
    const std::string item = j["item"].get<std::string>();
    if (!item.empty()) intent.item = item;
  }
  if (j.contains("parameters") && !j["parameters"].is_null()) {
    if (!j["parameters"].is_object()) return std::nullopt;
    for (const auto& [k, v] : j["parameters"].items()) {
      if (v.is_string()) intent.parameters[k] = v.get<std::string>();
      else if (v.is_number_integer()) intent.parameters[k] = std::to_string(v.get<long long>());
      else if (v.is_number() || v.is_boolean()) intent.parameters[k] = v.dump();
      else return std::nullopt;
    }
  }
  if (j.contains("confidence")) {
    if (!j["confidence"].is_number()) return std::nullopt;
    intent.confidence = std::clamp(j["confidence"].get<double>(), 0.0, 1.0);
  }
  return intent;
}

UnderstandResult external_understand(std::string_view transcript, double timeout_s, const UnderstanderConfig& cfg) {
  if (cfg.url.empty()) {
    UnderstandResult r;
    r.intent = parse(transcript);
    r.fallback = true;
    return r;
  }
  const auto endpoint = parse_url(cfg.url);
  if (!endpoint) return fallback(transcript, "understander: unsupported url '" + cfg.url + "'");

  try {
    httplib::Client client(endpoint->host, endpoint->port);
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
    const nlohmann::json body{{"transcript", std::string(transcript)}};
    auto res = client.Post(endpoint->path, headers, body.dump(), "application/json");
    if (!res) return fallback(transcript, "understander: " + httplib::to_string(res.error()));
    if (res->status != 200) return fallback(transcript, "understander: HTTP " + std::to_string(res->status));
    auto intent = intent_from_reply(res->body);
    if (!intent) return fallback(transcript, "understander: malformed reply");
    return {*intent, false, {}};
  } catch (const std::exception& e) {
    return fallback(transcript, std::string("understander: ") + e.what());
  }
}

}  // namespace rico
