#include "nl2sql/llm/templates.hpp"

#include <vector>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"

namespace nl2sql::assets {
const std::map<std::string, std::string_view>& templates();
}

namespace nl2sql::llm {

namespace {

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Calls on_text(literal) / on_placeholder(name) in order.
template <class Text, class Placeholder>
void scan(std::string_view body, Text on_text, Placeholder on_placeholder) {
  std::size_t literal_start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{' || i + 1 >= body.size() || !ident_start(body[i + 1])) continue;
    std::size_t j = i + 1;
    while (j < body.size() && ident_char(body[j])) ++j;
    if (j >= body.size() || body[j] != '}') continue;
    on_text(body.substr(literal_start, i - literal_start));
    on_placeholder(body.substr(i + 1, j - i - 1));
    literal_start = j + 1;
    i = j;
  }
  on_text(body.substr(literal_start));
}

}  // namespace

PromptTemplate PromptTemplate::make(std::string template_id, std::string body) {
  PromptTemplate t{std::move(template_id), std::move(body), {}};
  scan(t.body, [](std::string_view) {}, [&](std::string_view name) { t.required_placeholders.emplace(name); });
  return t;
}

std::string render(const PromptTemplate& tmpl, const Vars& vars) {
  std::vector<std::string> missing;
  for (const auto& name : tmpl.required_placeholders) {
    if (!vars.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw TemplateError("template '" + tmpl.template_id + "' is missing variables: " + names);
  }
  std::string out;
  out.reserve(tmpl.body.size());
  scan(
      tmpl.body, [&](std::string_view literal) { out.append(literal); },
      [&](std::string_view name) { out.append(vars.at(std::string(name))); });
  return out;
}

TemplateRegistry::TemplateRegistry() {
  for (const auto& [file, body] : assets::templates()) {
    std::string id = file;
    if (id.size() > 4 && id.compare(id.size() - 4, 4, ".txt") == 0) id.resize(id.size() - 4);
    add(PromptTemplate::make(id, std::string(body)));
  }
}

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry registry;
  return registry;
}

void TemplateRegistry::add(PromptTemplate tmpl) {
  std::string id = tmpl.template_id;
  templates_.insert_or_assign(std::move(id), std::move(tmpl));
}

void TemplateRegistry::load_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw IoError("template directory not found: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    add(PromptTemplate::make(entry.path().stem().string(), jsonl::read_file(entry.path())));
  }
}

bool TemplateRegistry::contains(std::string_view template_id) const {
  return templates_.find(template_id) != templates_.end();
}

const PromptTemplate& TemplateRegistry::get(std::string_view template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end()) throw ConfigError("unknown template_id '" + std::string(template_id) + "'");
  return it->second;
}

std::string TemplateRegistry::render(std::string_view template_id, const Vars& vars) const {
  return llm::render(get(template_id), vars);
}

std::set<std::string> TemplateRegistry::ids() const {
  std::set<std::string> out;
  for (const auto& [id, _] : templates_) out.insert(id);
  return out;
}

}  // namespace nl2sql::llm
