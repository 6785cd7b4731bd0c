#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace nl2sql::llm {

/// A prompt body with `{name}` placeholders (name = [A-Za-z_][A-Za-z0-9_]*).
/// Any other brace text, such as JSON examples, is literal.
struct PromptTemplate {
  std::string template_id;
  std::string body;
  std::set<std::string> required_placeholders;

  static PromptTemplate make(std::string template_id, std::string body);
};

using Vars = std::map<std::string, std::string>;

/// Substitutes every placeholder in one pass (values are not re-expanded).
/// Throws TemplateError listing every missing name. Extra vars are ignored.
std::string render(const PromptTemplate& tmpl, const Vars& vars);

/// Versioned templates keyed by id. Starts with the built-in set; a directory
/// of `<id>.txt` files can add or override entries.
class TemplateRegistry {
 public:
  TemplateRegistry();

  static const TemplateRegistry& builtin();

  void add(PromptTemplate tmpl);
  void load_directory(const std::filesystem::path& dir);

  bool contains(std::string_view template_id) const;
  /// Throws ConfigError for unknown ids.
  const PromptTemplate& get(std::string_view template_id) const;
  std::string render(std::string_view template_id, const Vars& vars) const;

  std::set<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace nl2sql::llm
