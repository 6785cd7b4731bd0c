#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "nl2sql/judge/judge.hpp"
#include "nl2sql/llm/cassette.hpp"
#include "nl2sql/llm/model.hpp"
#include "nl2sql/sql/dialect.hpp"
#include "nl2sql/workflow/executor.hpp"

namespace nl2sql::app {

enum class ProviderKind { http, scripted };

struct ProviderConfig {
  std::string name;
  ProviderKind kind = ProviderKind::scripted;
  std::string model_id;
  llm::DecodingParams params;
  std::string base_url;  // http
  std::string api_key_env = "OPENAI_API_KEY";
  std::int64_t timeout_ms = 60000;
  std::filesystem::path rules;  // scripted: rules JSON file

  llm::ModelRef model_ref() const { return {name, model_id, params}; }
};

struct RetrievalConfig {
  std::size_t k_knowledge = 3;
  std::size_t k_schema = 5;
  std::string embedder = "hashing";  // hashing | http
  std::size_t dim = 512;
  std::string embedding_base_url;  // http embedder
  std::string embedding_model;
  std::string embedding_api_key_env = "OPENAI_API_KEY";
  std::filesystem::path index;
  sql::Dialect dialect = sql::Dialect::sqlite;
};

struct WorkflowConfig {
  std::size_t max_tasks = 10;
  std::size_t parallelism = 1;
  workflow::SummaryMode summary_mode = workflow::SummaryMode::concat;
  std::string planner_model;
  std::string sql_model;
  std::string reasoning_model;  // sql_model when empty
  std::string summary_model;    // sql_model when empty
};

struct ExecConfig {
  std::string connection;
  std::size_t row_limit = 1000;
  std::int64_t timeout_ms = 10000;
  judge::OrderPolicy order_policy = judge::OrderPolicy::automatic;
  sql::Dialect dialect = sql::Dialect::sqlite;
};

struct JudgeConfig {
  std::string verdict_protocol = "verdict-line";
  std::string qse_model;
  std::string sse_model;
  std::size_t parallelism = 1;
  std::string method = "nl2sql";
};

struct CorpusConfig {
  sql::Dialect dialect = sql::Dialect::ansi;
  std::size_t parallelism = 1;
  std::string revllm_model;
  std::string revllm_template = "revllm.v1";
  std::string sqlllm_template;  // empty: pick by schema availability
};

struct CassetteConfig {
  llm::CassetteMode mode = llm::CassetteMode::passthrough;
  std::filesystem::path path;
};

struct Config {
  std::map<std::string, ProviderConfig> providers;
  RetrievalConfig retrieval;
  WorkflowConfig workflow;
  ExecConfig exec;
  JudgeConfig judge;
  CorpusConfig corpus;
  CassetteConfig cassette;
  std::filesystem::path templates_dir;

  /// Resolves a providers-table name; ConfigError naming `role` when unset or
  /// unknown.
  llm::ModelRef model(const std::string& name, std::string_view role) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads variables from the process environment.
std::optional<std::string> process_env(const std::string& name);

/// Replaces every ${NAME} with its value. Unset variables raise ConfigError.
std::string interpolate_env(std::string_view text, const EnvLookup& env);

/// Parses TOML text. Relative paths resolve against `base_dir`. Unknown
/// sections or keys, wrong types, non-positive bounds and dangling model
/// references raise ConfigError.
Config parse_config(std::string_view toml_text, const std::filesystem::path& base_dir,
                    const EnvLookup& env = process_env);

Config load_config(const std::filesystem::path& path, const EnvLookup& env = process_env);

}  // namespace nl2sql::app
