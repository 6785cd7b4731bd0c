#include "nl2sql/corpus/corpus.hpp"

#include <set>
#include <utility>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/hash.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/parallel.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/sql/parser.hpp"

namespace nl2sql::corpus {
namespace {

std::optional<std::string> string_field(const nlohmann::json& row, const char* key) {
  if (!row.contains(key) || !row[key].is_string()) return std::nullopt;
  return row[key].get<std::string>();
}

// Shared line loop; `accept` returns an empty string to keep the row or a
// rejection reason, and fills the record.
template <class Record, class Accept>
IngestResult<Record> ingest(const std::vector<std::filesystem::path>& paths, Accept accept) {
  IngestResult<Record> out;
  for (const auto& path : paths) {
    for (const auto& line : jsonl::read_lines(path)) {
      ++out.stats.read;
      const auto where = path.string() + ":" + std::to_string(line.number) + ": ";
      nlohmann::json row;
      try {
        row = nlohmann::json::parse(line.text);
      } catch (const nlohmann::json::exception&) {
        ++out.stats.rejected_malformed;
        out.stats.diagnostics.push_back(where + "malformed JSON");
        continue;
      }
      if (!row.is_object() || !string_field(row, "sql")) {
        ++out.stats.rejected_malformed;
        out.stats.diagnostics.push_back(where + "missing string field 'sql'");
        continue;
      }
      Record record;
      auto [counter, reason] = accept(row, path, record);
      if (counter) {
        ++(out.stats.*counter);
        out.stats.diagnostics.push_back(where + reason);
        continue;
      }
      ++out.stats.kept;
      out.records.push_back(std::move(record));
    }
  }
  return out;
}

using Counter = std::size_t IngestStats::*;

std::pair<Counter, std::string> check_sql(const std::string& sql, sql::Dialect dialect) {
  try {
    sql::parse_statement(sql, dialect);
  } catch (const SqlParseError& e) {
    return {&IngestStats::rejected_parse, std::string("SQL does not parse: ") + e.what()};
  }
  return {nullptr, {}};
}

template <class Record, class Key>
std::vector<Record> dedupe_by(const std::vector<Record>& records, Key key) {
  std::set<std::string> seen;
  std::vector<Record> out;
  for (const auto& r : records)
    if (seen.insert(key(r)).second) out.push_back(r);
  return out;
}

}  // namespace

std::string_view to_string(Origin origin) noexcept { return origin == Origin::generated ? "generated" : "annotated"; }

std::string content_id(std::string_view sql, std::string_view comment) {
  std::string material(sql);
  material += '\x1f';
  material += comment;
  return "h:" + sha256_hex(material).substr(0, 16);
}

IngestResult<SqlCommentRecord> ingest_sql_comments(const std::vector<std::filesystem::path>& paths,
                                                   sql::Dialect dialect) {
  return ingest<SqlCommentRecord>(
      paths, [&](const nlohmann::json& row, const std::filesystem::path& path, SqlCommentRecord& r) {
        r.sql = *string_field(row, "sql");
        r.comment = string_field(row, "comment").value_or("");
        if (text::trim(r.comment).empty()) return std::pair<Counter, std::string>{&IngestStats::rejected_empty, "empty comment"};
        auto verdict = check_sql(r.sql, dialect);
        if (verdict.first) return verdict;
        r.id = string_field(row, "id").value_or("");
        if (r.id.empty()) r.id = content_id(r.sql, r.comment);
        r.source = string_field(row, "source").value_or(path.string());
        return verdict;
      });
}

IngestResult<RawSqlRecord> ingest_raw_sql(const std::vector<std::filesystem::path>& paths, sql::Dialect dialect) {
  return ingest<RawSqlRecord>(paths,
                              [&](const nlohmann::json& row, const std::filesystem::path& path, RawSqlRecord& r) {
                                r.sql = *string_field(row, "sql");
                                auto verdict = check_sql(r.sql, dialect);
                                if (verdict.first) return verdict;
                                r.id = string_field(row, "id").value_or("");
                                if (r.id.empty()) r.id = content_id(r.sql);
                                r.source = string_field(row, "source").value_or(path.string());
                                return verdict;
                              });
}

std::string dedupe_key(std::string_view sql, sql::Dialect dialect) {
  try {
    return sql::normalize_sql(sql, dialect);
  } catch (const SqlParseError&) {
    return std::string(text::trim(sql));
  }
}

std::vector<SqlCommentRecord> dedupe(const std::vector<SqlCommentRecord>& records, sql::Dialect dialect) {
  return dedupe_by(records, [&](const SqlCommentRecord& r) { return dedupe_key(r.sql, dialect); });
}

std::vector<RawSqlRecord> dedupe(const std::vector<RawSqlRecord>& records, sql::Dialect dialect) {
  return dedupe_by(records, [&](const RawSqlRecord& r) { return dedupe_key(r.sql, dialect); });
}

std::vector<QuerySqlPair> dedupe(const std::vector<QuerySqlPair>& pairs, sql::Dialect dialect) {
  return dedupe_by(pairs, [&](const QuerySqlPair& p) {
    return std::string(text::trim(p.query)) + '\x1f' + dedupe_key(p.sql, dialect);
  });
}

std::vector<SftExample> build_revllm_sft(const std::vector<SqlCommentRecord>& records, const std::string& template_id,
                                         const llm::TemplateRegistry& templates) {
  const auto& tmpl = templates.get(template_id);
  if (records.empty()) throw ConfigError("empty dataset");
  std::vector<SftExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    SftExample ex;
    ex.prompt = llm::render(tmpl, {{"sql", r.sql}});
    ex.completion = r.comment;
    ex.meta = {r.id, template_id};
    out.push_back(std::move(ex));
  }
  return out;
}

SqlSftBuild build_sqlllm_sft(const std::vector<QuerySqlPair>& pairs, const std::string& template_id,
                             const std::string& schema, const llm::TemplateRegistry& templates,
                             sql::Dialect dialect) {
  SqlSftBuild out;
  out.template_id = !template_id.empty() ? template_id : (schema.empty() ? "sqlllm.v1" : "sqlllm.schema.v1");
  const auto& tmpl = templates.get(out.template_id);
  if (pairs.empty()) throw ConfigError("empty dataset");
  const auto unique = dedupe(pairs, dialect);
  out.duplicates = pairs.size() - unique.size();
  for (const auto& p : unique) {
    SftExample ex;
    ex.prompt = llm::render(tmpl, {{"query", p.query}, {"schema", schema.empty() ? "(none)" : schema}});
    ex.completion = p.sql;
    ex.meta = {p.id, out.template_id};
    out.examples.push_back(std::move(ex));
  }
  return out;
}

GenerationResult generate_queries(const std::vector<RawSqlRecord>& raw, const llm::ModelRef& model,
                                  llm::Provider& provider, const GenerationOptions& options) {
  const auto& templates = options.templates ? *options.templates : llm::TemplateRegistry::builtin();
  const auto& tmpl = templates.get(options.template_id);

  struct Attempt {
    std::optional<std::string> query;
    std::optional<std::string> error;
  };
  auto attempts = ordered_parallel_map(raw.size(), options.parallelism, [&](std::size_t i) {
    Attempt a;
    try {
      const auto prompt = llm::render(tmpl, {{"sql", raw[i].sql}});
      a.query = std::string(text::trim(llm::complete_with_retry(provider, model, prompt, options.retry).text));
    } catch (const Error& e) {
      a.error = std::string(e.kind()) + ": " + text::single_line(e.what());
    }
    return a;
  });

  GenerationResult out;
  out.stats.input = raw.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (attempts[i].error) {
      out.stats.failures.push_back({raw[i].id, *attempts[i].error});
    } else if (attempts[i].query->empty()) {
      ++out.stats.dropped_empty;
    } else {
      out.pairs.push_back({raw[i].id, *attempts[i].query, raw[i].sql, Origin::generated});
    }
  }
  out.stats.generated = out.pairs.size();
  return out;
}

nlohmann::json to_json(const SqlCommentRecord& r) {
  return {{"id", r.id}, {"sql", r.sql}, {"comment", r.comment}, {"source", r.source}};
}

nlohmann::json to_json(const RawSqlRecord& r) { return {{"id", r.id}, {"sql", r.sql}, {"source", r.source}}; }

nlohmann::json to_json(const QuerySqlPair& p) {
  return {{"id", p.id}, {"query", p.query}, {"sql", p.sql}, {"origin", to_string(p.origin)}};
}

nlohmann::json to_json(const SftExample& ex) {
  return {{"prompt", ex.prompt},
          {"completion", ex.completion},
          {"meta", {{"source_id", ex.meta.source_id}, {"template_id", ex.meta.template_id}}}};
}

nlohmann::json to_json(const IngestStats& s) {
  return {{"read", s.read},
          {"kept", s.kept},
          {"rejected_parse", s.rejected_parse},
          {"rejected_empty", s.rejected_empty},
          {"rejected_malformed", s.rejected_malformed},
          {"diagnostics", s.diagnostics}};
}

nlohmann::json to_json(const GenerationStats& s) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : s.failures) failures.push_back({{"id", f.id}, {"error", f.error}});
  return {{"input", s.input},
          {"generated", s.generated},
          {"dropped_empty", s.dropped_empty},
          {"failed", s.failures.size()},
          {"failures", std::move(failures)}};
}

SqlCommentRecord comment_record_from_json(const nlohmann::json& row) {
  try {
    return {row.at("id").get<std::string>(), row.at("sql").get<std::string>(), row.at("comment").get<std::string>(),
            row.value("source", std::string())};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad SQL-comment record: ") + e.what());
  }
}

QuerySqlPair pair_from_json(const nlohmann::json& row) {
  try {
    QuerySqlPair p{row.at("id").get<std::string>(), row.at("query").get<std::string>(),
                   row.at("sql").get<std::string>(), Origin::generated};
    const auto origin = row.value("origin", std::string("generated"));
    if (origin == "annotated") {
      p.origin = Origin::annotated;
    } else if (origin != "generated") {
      throw ConfigError("unknown origin '" + origin + "'");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad query-SQL pair: ") + e.what());
  }
}

SftExample sft_from_json(const nlohmann::json& row) {
  try {
    SftExample ex;
    ex.prompt = row.at("prompt").get<std::string>();
    ex.completion = row.at("completion").get<std::string>();
    const auto& meta = row.at("meta");
    ex.meta.source_id = meta.at("source_id").get<std::string>();
    ex.meta.template_id = meta.at("template_id").get<std::string>();
    return ex;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad SFT example: ") + e.what());
  }
}

std::vector<QuerySqlPair> read_pairs(const std::filesystem::path& path) {
  std::vector<QuerySqlPair> out;
  for (const auto& line : jsonl::read_lines(path)) {
    try {
      out.push_back(pair_from_json(nlohmann::json::parse(line.text)));
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line.number) + ": " + e.what());
    }
  }
  return out;
}

template <class T>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& rows) {
  std::string content;
  for (const auto& r : rows) {
    content += jsonl::dump(to_json(r));
    content += '\n';
  }
  jsonl::write_file_atomic(path, content);
}

template void write_jsonl(const std::filesystem::path&, const std::vector<SqlCommentRecord>&);
template void write_jsonl(const std::filesystem::path&, const std::vector<RawSqlRecord>&);
template void write_jsonl(const std::filesystem::path&, const std::vector<QuerySqlPair>&);
template void write_jsonl(const std::filesystem::path&, const std::vector<SftExample>&);

void write_sft(const std::filesystem::path& path, const std::vector<SftExample>& examples) {
  write_jsonl(path, examples);
}

std::vector<SftExample> read_sft(const std::filesystem::path& path) {
  std::vector<SftExample> out;
  for (const auto& line : jsonl::read_lines(path)) {
    try {
      out.push_back(sft_from_json(nlohmann::json::parse(line.text)));
    } catch (const std::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line.number) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace nl2sql::corpus
