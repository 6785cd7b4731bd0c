#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nl2sql/retrieval/embedder.hpp"
#include "nl2sql/retrieval/types.hpp"
#include "nl2sql/sql/dialect.hpp"

namespace nl2sql::retrieval {

struct IndexStats {
  std::size_t docs = 0;
  std::size_t tables = 0;
  std::size_t rejected_docs = 0;
  std::size_t rejected_tables = 0;
  std::vector<std::string> diagnostics;
};

/// Parses an entry's DDL into a TableSchema. Throws SqlParseError for bad DDL
/// and ConfigError for non-CREATE TABLE statements or duplicate column names.
TableSchema table_from_entry(const TableHubEntry& entry, sql::Dialect dialect);

/// Text embedded for each item.
std::string embedding_text(const KnowledgeDoc& doc);
std::string embedding_text(const TableSchema& table);

/// Immutable brute-force vector index over two pools (knowledge, schemas).
///
/// On disk it is one JSONL file: a header line {id: "__meta__", kind: "meta",
/// vector: [], payload: {embedder, dim, docs, tables}} followed by one
/// {id, kind: "knowledge"|"schema", vector, payload} line per item.
class Index {
 public:
  Index() = default;

  static Index build(const std::vector<KnowledgeDoc>& docs, const std::vector<TableHubEntry>& tables,
                     const Embedder& embedder, sql::Dialect dialect = sql::Dialect::ansi);

  /// Writes to a temp file then renames over `path`.
  void save(const std::filesystem::path& path) const;
  static Index load(const std::filesystem::path& path);

  /// Top-k per pool by cosine similarity, ties broken by ascending id.
  /// Throws ConfigError for an empty query or an embedder mismatch.
  RetrievalContext retrieve(const std::string& query, std::size_t k_knowledge, std::size_t k_schema,
                            const Embedder& embedder) const;

  const IndexStats& stats() const noexcept { return stats_; }
  const std::string& embedder_name() const noexcept { return embedder_name_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<KnowledgeDoc>& docs() const noexcept { return docs_; }
  const std::vector<TableSchema>& tables() const noexcept { return tables_; }
  /// Row-major vectors, one row of dim() values per doc / table.
  const std::vector<double>& doc_vectors() const noexcept { return doc_vectors_; }
  const std::vector<double>& table_vectors() const noexcept { return table_vectors_; }

 private:
  std::string embedder_name_;
  std::size_t dim_ = 0;
  std::vector<KnowledgeDoc> docs_;
  std::vector<double> doc_vectors_;
  std::vector<TableSchema> tables_;
  std::vector<double> table_vectors_;
  IndexStats stats_;
};

/// Indices of the top `k` scores ordered by (score desc, key asc).
std::vector<std::size_t> top_k(const std::vector<double>& scores, const std::vector<const std::string*>& keys,
                               std::size_t k);

}  // namespace nl2sql::retrieval
