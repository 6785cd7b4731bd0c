#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "nl2sql/llm/provider.hpp"

namespace nl2sql::llm {

/// Deterministic provider driven by ordered rules: the first rule whose regex
/// matches anywhere in the prompt produces the response. Pure: equal prompts
/// always yield equal responses.
class ScriptedProvider final : public Provider {
 public:
  using Responder = std::function<std::string(std::string_view prompt)>;

  explicit ScriptedProvider(std::string name = "scripted") : name_(std::move(name)) {}

  ScriptedProvider& add_rule(const std::string& pattern, std::string response);
  ScriptedProvider& add_rule(const std::string& pattern, Responder responder);
  /// Response when no rule matches. Without one, a miss throws a
  /// non-retriable TransportError.
  ScriptedProvider& set_fallback(std::string response);

  /// Loads `[{"match": regex, "response": text}, ...]`.
  static ScriptedProvider from_json_text(std::string_view json_text, std::string name = "scripted");
  static ScriptedProvider from_file(const std::filesystem::path& path, std::string name = "scripted");

  Completion complete(const ModelRef& model, std::string_view prompt) override;
  std::string name() const override { return name_; }

 private:
  struct Rule {
    std::string pattern;
    std::regex regex;
    Responder respond;
  };
  std::string name_;
  std::vector<Rule> rules_;
  std::optional<std::string> fallback_;
};

}  // namespace nl2sql::llm
