#include "nl2sql/llm/scripted.hpp"

#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"

namespace nl2sql::llm {

ScriptedProvider& ScriptedProvider::add_rule(const std::string& pattern, std::string response) {
  return add_rule(pattern, Responder([response = std::move(response)](std::string_view) { return response; }));
}

ScriptedProvider& ScriptedProvider::add_rule(const std::string& pattern, Responder responder) {
  try {
    rules_.push_back({pattern, std::regex(pattern, std::regex::ECMAScript), std::move(responder)});
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid scripted rule pattern '" + pattern + "': " + e.what());
  }
  return *this;
}

ScriptedProvider& ScriptedProvider::set_fallback(std::string response) {
  fallback_ = std::move(response);
  return *this;
}

ScriptedProvider ScriptedProvider::from_json_text(std::string_view json_text, std::string name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scripted rules: ") + e.what());
  }
  ScriptedProvider provider(std::move(name));
  const nlohmann::json& rules = doc.is_object() ? doc.value("rules", nlohmann::json::array()) : doc;
  if (!rules.is_array()) throw ConfigError("scripted rules: expected an array of {match, response}");
  for (const auto& rule : rules) {
    if (!rule.is_object() || !rule.contains("match") || !rule.contains("response") ||
        !rule["match"].is_string() || !rule["response"].is_string()) {
      throw ConfigError("scripted rules: each rule needs string 'match' and 'response'");
    }
    provider.add_rule(rule["match"].get<std::string>(), rule["response"].get<std::string>());
  }
  if (doc.is_object() && doc.contains("fallback") && doc["fallback"].is_string()) {
    provider.set_fallback(doc["fallback"].get<std::string>());
  }
  return provider;
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path, std::string name) {
  return from_json_text(jsonl::read_file(path), std::move(name));
}

Completion ScriptedProvider::complete(const ModelRef&, std::string_view prompt) {
  for (const Rule& rule : rules_) {
    if (std::regex_search(prompt.begin(), prompt.end(), rule.regex)) return Completion{rule.respond(prompt), {}, 0};
  }
  if (fallback_) return Completion{*fallback_, {}, 0};
  throw TransportError("scripted provider '" + name_ + "': no rule matches prompt", /*retriable=*/false);
}

}  // namespace nl2sql::llm
