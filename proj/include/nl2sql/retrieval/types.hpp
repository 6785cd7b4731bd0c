#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace nl2sql::retrieval {

struct KnowledgeDoc {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> tags;
};

struct SchemaColumn {
  std::string name;
  std::string type;
  std::string comment;
};

struct TableSchema {
  std::string table_name;
  std::vector<SchemaColumn> columns;
  std::string ddl;
  std::string description;
};

/// One TableHub input row, before its DDL has been parsed.
struct TableHubEntry {
  std::string table_name;
  std::string ddl;
  std::string description;
  std::map<std::string, std::string> column_comments;
};

struct KnowledgeHit {
  std::string id;
  double score = 0.0;
  KnowledgeDoc doc;
};

struct SchemaHit {
  std::string table_name;
  double score = 0.0;
  TableSchema table;
};

/// The assembled context for one query: ranked knowledge and schema hits plus
/// the text block injected into prompts.
struct RetrievalContext {
  std::string query;
  std::vector<KnowledgeHit> knowledge_hits;  // score non-increasing
  std::vector<SchemaHit> schema_hits;        // score non-increasing
  std::string rendered;
};

/// Schemas first (DDL plus column comments), then knowledge snippets, each
/// under a labeled heading. Sections with no hits are omitted.
std::string render_context(const std::string& query, const std::vector<KnowledgeHit>& knowledge,
                           const std::vector<SchemaHit>& schemas);

nlohmann::json to_json(const KnowledgeDoc& doc);
nlohmann::json to_json(const TableSchema& table);
nlohmann::json to_json(const RetrievalContext& context);
KnowledgeDoc knowledge_from_json(const nlohmann::json& row);
TableSchema table_from_json(const nlohmann::json& row);
TableHubEntry tablehub_from_json(const nlohmann::json& row);

}  // namespace nl2sql::retrieval
