#include "nl2sql/app/config.hpp"

#include <cstdlib>
#include <set>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"

namespace nl2sql::app {
namespace {

// Typed, strict access to one TOML table: every key read is remembered and
// finish() rejects the rest.
class Section {
 public:
  Section(const toml::table* table, std::string name, const EnvLookup& env, const std::filesystem::path& base)
      : table_(table), name_(std::move(name)), env_(env), base_(base) {}

  std::optional<std::string> str(const std::string& key) {
    const auto* node = get(key);
    if (!node) return std::nullopt;
    const auto* v = node->as_string();
    if (!v) fail(key, "must be a string");
    return interpolate_env(v->get(), env_);
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const auto* node = get(key);
    if (!node) return std::nullopt;
    const auto* v = node->as_integer();
    if (!v) fail(key, "must be an integer");
    return v->get();
  }

  std::optional<double> number(const std::string& key) {
    const auto* node = get(key);
    if (!node) return std::nullopt;
    if (const auto* i = node->as_integer()) return static_cast<double>(i->get());
    const auto* v = node->as_floating_point();
    if (!v) fail(key, "must be a number");
    return v->get();
  }

  std::optional<std::filesystem::path> path(const std::string& key) {
    auto s = str(key);
    if (!s) return std::nullopt;
    std::filesystem::path p(*s);
    return p.is_relative() && !s->empty() ? base_ / p : p;
  }

  void positive(const std::string& key, std::size_t& target) {
    if (auto v = integer(key)) {
      if (*v < 1) fail(key, "must be positive");
      target = static_cast<std::size_t>(*v);
    }
  }

  void positive(const std::string& key, std::int64_t& target) {
    if (auto v = integer(key)) {
      if (*v < 1) fail(key, "must be positive");
      target = *v;
    }
  }

  void set(const std::string& key, std::string& target) {
    if (auto v = str(key)) target = *v;
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, node] : *table_) {
      if (!seen_.count(std::string(key.str())))
        throw ConfigError("config: unknown key '" + std::string(key.str()) + "' in [" + name_ + "]");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config: " + name_ + "." + key + " " + what);
  }

 private:
  const toml::node* get(const std::string& key) {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  const toml::table* table_;
  std::string name_;
  const EnvLookup& env_;
  const std::filesystem::path& base_;
  std::set<std::string> seen_;
};

const toml::table* subtable(const toml::table& root, const std::string& key) {
  const auto* node = root.get(key);
  if (!node) return nullptr;
  const auto* t = node->as_table();
  if (!t) throw ConfigError("config: [" + key + "] must be a table");
  return t;
}

template <class Fn>
auto parse_enum(Section& s, const std::string& key, Fn fn) -> std::optional<decltype(fn(std::string_view{}))> {
  auto v = s.str(key);
  if (!v) return std::nullopt;
  try {
    return fn(*v);
  } catch (const ConfigError& e) {
    s.fail(key, e.what());
  }
}

void check_model(const Config& c, const std::string& name, std::string_view role) {
  if (!name.empty()) c.model(name, role);
}

}  // namespace

llm::ModelRef Config::model(const std::string& name, std::string_view role) const {
  if (name.empty()) throw ConfigError("config: no model configured for " + std::string(role));
  auto it = providers.find(name);
  if (it == providers.end())
    throw ConfigError("config: " + std::string(role) + " refers to unknown provider '" + name + "'");
  return it->second.model_ref();
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::string interpolate_env(std::string_view text, const EnvLookup& env) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, 2, "${") == 0) {
      const auto close = text.find('}', i + 2);
      if (close == std::string_view::npos) throw ConfigError("config: unterminated ${ in '" + std::string(text) + "'");
      const std::string name(text.substr(i + 2, close - i - 2));
      auto value = env(name);
      if (!value) throw ConfigError("config: environment variable " + name + " is not set");
      out += *value;
      i = close + 1;
    } else {
      out += text[i++];
    }
  }
  return out;
}

Config parse_config(std::string_view toml_text, const std::filesystem::path& base_dir, const EnvLookup& env) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("config: " + std::string(e.description()) + " at line " +
                      std::to_string(e.source().begin.line));
  }
  static const std::set<std::string> kSections = {"providers", "retrieval", "workflow", "exec",
                                                  "judge",     "corpus",    "cassette", "templates"};
  for (const auto& [key, node] : root)
    if (!kSections.count(std::string(key.str())))
      throw ConfigError("config: unknown section [" + std::string(key.str()) + "]");

  Config c;
  if (const auto* providers = subtable(root, "providers")) {
    for (const auto& [key, node] : *providers) {
      const std::string name(key.str());
      const auto* t = node.as_table();
      if (!t) throw ConfigError("config: providers." + name + " must be a table");
      Section s(t, "providers." + name, env, base_dir);
      ProviderConfig p;
      p.name = name;
      const auto kind = s.str("provider").value_or("");
      if (kind == "http") {
        p.kind = ProviderKind::http;
      } else if (kind == "scripted") {
        p.kind = ProviderKind::scripted;
      } else {
        s.fail("provider", "must be \"http\" or \"scripted\"");
      }
      p.model_id = s.str("model_id").value_or(name);
      if (auto t = s.number("temperature")) p.params.temperature = *t;
      if (auto m = s.integer("max_tokens")) p.params.max_tokens = static_cast<int>(*m);
      s.set("base_url", p.base_url);
      s.set("api_key_env", p.api_key_env);
      s.positive("timeout_ms", p.timeout_ms);
      if (auto r = s.path("rules")) p.rules = *r;
      s.finish();
      try {
        p.model_ref().validate();
      } catch (const ConfigError& e) {
        throw ConfigError("config: providers." + name + ": " + e.what());
      }
      if (p.kind == ProviderKind::http && p.base_url.empty()) s.fail("base_url", "is required for http providers");
      if (p.kind == ProviderKind::scripted && p.rules.empty()) s.fail("rules", "is required for scripted providers");
      c.providers.emplace(name, std::move(p));
    }
  }
  {
    Section s(subtable(root, "retrieval"), "retrieval", env, base_dir);
    s.positive("k_knowledge", c.retrieval.k_knowledge);
    s.positive("k_schema", c.retrieval.k_schema);
    s.set("embedder", c.retrieval.embedder);
    s.positive("dim", c.retrieval.dim);
    s.set("embedding_base_url", c.retrieval.embedding_base_url);
    s.set("embedding_model", c.retrieval.embedding_model);
    s.set("embedding_api_key_env", c.retrieval.embedding_api_key_env);
    if (auto p = s.path("index")) c.retrieval.index = *p;
    if (auto d = parse_enum(s, "dialect", sql::parse_dialect)) c.retrieval.dialect = *d;
    s.finish();
    if (c.retrieval.embedder != "hashing" && c.retrieval.embedder != "http")
      s.fail("embedder", "must be \"hashing\" or \"http\"");
    if (c.retrieval.embedder == "http" && (c.retrieval.embedding_base_url.empty() || c.retrieval.embedding_model.empty()))
      s.fail("embedder", "\"http\" needs embedding_base_url and embedding_model");
  }
  {
    Section s(subtable(root, "workflow"), "workflow", env, base_dir);
    s.positive("max_tasks", c.workflow.max_tasks);
    s.positive("parallelism", c.workflow.parallelism);
    if (auto m = parse_enum(s, "summary_mode", workflow::parse_summary_mode)) c.workflow.summary_mode = *m;
    s.set("planner_model", c.workflow.planner_model);
    s.set("sql_model", c.workflow.sql_model);
    s.set("reasoning_model", c.workflow.reasoning_model);
    s.set("summary_model", c.workflow.summary_model);
    s.finish();
  }
  {
    Section s(subtable(root, "exec"), "exec", env, base_dir);
    if (auto conn = s.str("connection")) {
      // Bare or sqlite: paths are relative to the config file.
      auto spec = sqlexec::ConnectionSpec::parse(*conn);
      if (spec.path != ":memory:" && std::filesystem::path(spec.path).is_relative())
        spec.path = (base_dir / spec.path).string();
      c.exec.connection = spec.to_string();
    }
    s.positive("row_limit", c.exec.row_limit);
    s.positive("timeout_ms", c.exec.timeout_ms);
    if (auto p = parse_enum(s, "order_sensitivity", judge::parse_order_policy)) c.exec.order_policy = *p;
    if (auto d = parse_enum(s, "dialect", sql::parse_dialect)) c.exec.dialect = *d;
    s.finish();
  }
  {
    Section s(subtable(root, "judge"), "judge", env, base_dir);
    s.set("verdict_protocol", c.judge.verdict_protocol);
    s.set("qse_model", c.judge.qse_model);
    s.set("sse_model", c.judge.sse_model);
    s.positive("parallelism", c.judge.parallelism);
    s.set("method", c.judge.method);
    s.finish();
    if (c.judge.verdict_protocol != "verdict-line")
      s.fail("verdict_protocol", "must be \"verdict-line\" (the only supported protocol)");
  }
  {
    Section s(subtable(root, "corpus"), "corpus", env, base_dir);
    if (auto d = parse_enum(s, "dialect", sql::parse_dialect)) c.corpus.dialect = *d;
    s.positive("parallelism", c.corpus.parallelism);
    s.set("revllm_model", c.corpus.revllm_model);
    s.set("revllm_template", c.corpus.revllm_template);
    s.set("sqlllm_template", c.corpus.sqlllm_template);
    s.finish();
  }
  {
    Section s(subtable(root, "cassette"), "cassette", env, base_dir);
    if (auto m = parse_enum(s, "mode", llm::parse_cassette_mode)) c.cassette.mode = *m;
    if (auto p = s.path("path")) c.cassette.path = *p;
    s.finish();
    if (c.cassette.mode != llm::CassetteMode::passthrough && c.cassette.path.empty())
      s.fail("path", "is required for record and replay modes");
  }
  {
    Section s(subtable(root, "templates"), "templates", env, base_dir);
    if (auto p = s.path("dir")) c.templates_dir = *p;
    s.finish();
  }

  check_model(c, c.workflow.planner_model, "workflow.planner_model");
  check_model(c, c.workflow.sql_model, "workflow.sql_model");
  check_model(c, c.workflow.reasoning_model, "workflow.reasoning_model");
  check_model(c, c.workflow.summary_model, "workflow.summary_model");
  check_model(c, c.judge.qse_model, "judge.qse_model");
  check_model(c, c.judge.sse_model, "judge.sse_model");
  check_model(c, c.corpus.revllm_model, "corpus.revllm_model");
  return c;
}

Config load_config(const std::filesystem::path& path, const EnvLookup& env) {
  std::string text;
  try {
    text = jsonl::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(text, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."), env);
}

}  // namespace nl2sql::app
