#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nl2sql/llm/provider.hpp"
#include "nl2sql/llm/templates.hpp"
#include "nl2sql/sql/dialect.hpp"

namespace nl2sql::corpus {

/// An annotated <SQL, COMMENT> pair from development history.
struct SqlCommentRecord {
  std::string id;
  std::string sql;
  std::string comment;
  std::string source;

  bool operator==(const SqlCommentRecord&) const = default;
};

struct RawSqlRecord {
  std::string id;
  std::string sql;
  std::string source;

  bool operator==(const RawSqlRecord&) const = default;
};

enum class Origin { generated, annotated };

std::string_view to_string(Origin origin) noexcept;

struct QuerySqlPair {
  std::string id;
  std::string query;
  std::string sql;
  Origin origin = Origin::generated;

  bool operator==(const QuerySqlPair&) const = default;
};

struct SftMeta {
  std::string source_id;
  std::string template_id;

  bool operator==(const SftMeta&) const = default;
};

struct SftExample {
  std::string prompt;
  std::string completion;
  SftMeta meta;

  bool operator==(const SftExample&) const = default;
};

struct IngestStats {
  std::size_t read = 0;  // non-blank input lines
  std::size_t kept = 0;
  std::size_t rejected_parse = 0;
  std::size_t rejected_empty = 0;      // empty or missing comment
  std::size_t rejected_malformed = 0;  // not JSON, or no string `sql`
  std::vector<std::string> diagnostics;  // "<path>:<line>: <reason>"

  std::size_t rejected() const noexcept { return rejected_parse + rejected_empty + rejected_malformed; }
};

template <class Record>
struct IngestResult {
  std::vector<Record> records;
  IngestStats stats;
};

/// Derived id for rows without one: "h:" + first 16 hex chars of
/// sha256(sql + '\x1f' + comment).
std::string content_id(std::string_view sql, std::string_view comment = {});

/// Reads `{id?, sql, comment?, source?}` JSONL files. Keeps rows whose SQL
/// parses as one statement and whose comment is non-blank. Throws IoError for
/// unreadable files; bad rows are counted, never fatal. `source` defaults to
/// the file path.
IngestResult<SqlCommentRecord> ingest_sql_comments(const std::vector<std::filesystem::path>& paths,
                                                   sql::Dialect dialect = sql::Dialect::ansi);

/// Same input schema, comment ignored.
IngestResult<RawSqlRecord> ingest_raw_sql(const std::vector<std::filesystem::path>& paths,
                                          sql::Dialect dialect = sql::Dialect::ansi);

/// Dedupe key: normalize_sql(sql), or the trimmed text when it does not parse.
std::string dedupe_key(std::string_view sql, sql::Dialect dialect = sql::Dialect::ansi);

/// First occurrence per dedupe_key wins; order is kept.
std::vector<SqlCommentRecord> dedupe(const std::vector<SqlCommentRecord>& records,
                                     sql::Dialect dialect = sql::Dialect::ansi);
std::vector<RawSqlRecord> dedupe(const std::vector<RawSqlRecord>& records, sql::Dialect dialect = sql::Dialect::ansi);
/// Pairs dedupe on (trimmed query, dedupe_key(sql)).
std::vector<QuerySqlPair> dedupe(const std::vector<QuerySqlPair>& pairs, sql::Dialect dialect = sql::Dialect::ansi);

/// One example per record: prompt = template rendered with {sql},
/// completion = comment. Throws ConfigError("empty dataset") for no records
/// and for unknown template ids.
std::vector<SftExample> build_revllm_sft(const std::vector<SqlCommentRecord>& records,
                                         const std::string& template_id = "revllm.v1",
                                         const llm::TemplateRegistry& templates = llm::TemplateRegistry::builtin());

struct SqlSftBuild {
  std::vector<SftExample> examples;
  std::size_t duplicates = 0;  // pairs dropped by (query, sql) dedupe
  std::string template_id;
};

/// Dedupes pairs, then prompt = template rendered with {query} (and {schema}
/// when the template has it), completion = sql. An empty template id picks
/// sqlllm.schema.v1 when `schema` is non-empty, sqlllm.v1 otherwise.
SqlSftBuild build_sqlllm_sft(const std::vector<QuerySqlPair>& pairs, const std::string& template_id = {},
                             const std::string& schema = {},
                             const llm::TemplateRegistry& templates = llm::TemplateRegistry::builtin(),
                             sql::Dialect dialect = sql::Dialect::ansi);

struct GenerationFailure {
  std::string id;
  std::string error;
};

struct GenerationStats {
  std::size_t input = 0;
  std::size_t generated = 0;
  std::size_t dropped_empty = 0;
  std::vector<GenerationFailure> failures;
};

struct GenerationResult {
  std::vector<QuerySqlPair> pairs;  // input order
  GenerationStats stats;
};

struct GenerationOptions {
  std::string template_id = "revllm.v1";
  std::size_t parallelism = 1;
  llm::RetryPolicy retry;
  const llm::TemplateRegistry* templates = nullptr;
};

/// Reverse generation: asks the model to describe each SQL statement as a
/// question. Completions are trimmed; empty ones are dropped and counted.
/// Provider failures (after retries) are recorded per record.
GenerationResult generate_queries(const std::vector<RawSqlRecord>& raw, const llm::ModelRef& model,
                                  llm::Provider& provider, const GenerationOptions& options = {});

nlohmann::json to_json(const SqlCommentRecord& record);
nlohmann::json to_json(const RawSqlRecord& record);
nlohmann::json to_json(const QuerySqlPair& pair);
nlohmann::json to_json(const SftExample& example);
nlohmann::json to_json(const IngestStats& stats);
nlohmann::json to_json(const GenerationStats& stats);

SqlCommentRecord comment_record_from_json(const nlohmann::json& row);
QuerySqlPair pair_from_json(const nlohmann::json& row);
SftExample sft_from_json(const nlohmann::json& row);

/// Reads a `{id, query, sql, origin?}` JSONL file (strict: bad rows throw).
std::vector<QuerySqlPair> read_pairs(const std::filesystem::path& path);

void write_sft(const std::filesystem::path& path, const std::vector<SftExample>& examples);
std::vector<SftExample> read_sft(const std::filesystem::path& path);

template <class T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& rows);

}  // namespace nl2sql::corpus
