#include "nl2sql/retrieval/types.hpp"

#include "nl2sql/common/error.hpp"

namespace nl2sql::retrieval {

std::string render_context(const std::string& query, const std::vector<KnowledgeHit>& knowledge,
                           const std::vector<SchemaHit>& schemas) {
  std::string out = "### Query\n" + query + "\n";
  if (!schemas.empty()) {
    out += "\n### Table Schemas\n";
    for (const SchemaHit& hit : schemas) {
      const TableSchema& t = hit.table;
      out += "\n-- table: " + t.table_name + "\n";
      if (!t.description.empty()) out += "-- " + t.description + "\n";
      out += t.ddl;
      if (!t.ddl.empty() && t.ddl.back() != '\n') out += "\n";
      bool any_comment = false;
      for (const SchemaColumn& c : t.columns) any_comment |= !c.comment.empty();
      if (any_comment) {
        out += "-- columns:\n";
        for (const SchemaColumn& c : t.columns) {
          if (!c.comment.empty()) out += "--   " + c.name + ": " + c.comment + "\n";
        }
      }
    }
  }
  if (!knowledge.empty()) {
    out += "\n### Domain Knowledge\n";
    for (const KnowledgeHit& hit : knowledge) {
      out += "\n[" + hit.doc.id + "] " + hit.doc.title + "\n" + hit.doc.body + "\n";
    }
  }
  return out;
}

nlohmann::json to_json(const KnowledgeDoc& doc) {
  return {{"id", doc.id}, {"title", doc.title}, {"body", doc.body}, {"tags", doc.tags}};
}

nlohmann::json to_json(const TableSchema& table) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : table.columns) cols.push_back({{"name", c.name}, {"type", c.type}, {"comment", c.comment}});
  return {{"table_name", table.table_name},
          {"columns", std::move(cols)},
          {"ddl", table.ddl},
          {"description", table.description}};
}

nlohmann::json to_json(const RetrievalContext& context) {
  nlohmann::json k = nlohmann::json::array();
  for (const auto& hit : context.knowledge_hits) k.push_back({{"id", hit.id}, {"score", hit.score}});
  nlohmann::json s = nlohmann::json::array();
  for (const auto& hit : context.schema_hits) s.push_back({{"table_name", hit.table_name}, {"score", hit.score}});
  return {{"query", context.query}, {"knowledge_hits", std::move(k)}, {"schema_hits", std::move(s)},
          {"rendered", context.rendered}};
}

namespace {
std::string str_field(const nlohmann::json& row, const char* key, bool required) {
  if (!row.contains(key) || row[key].is_null()) {
    if (required) throw ConfigError(std::string("missing field '") + key + "'");
    return {};
  }
  if (!row[key].is_string()) throw ConfigError(std::string("field '") + key + "' must be a string");
  return row[key].get<std::string>();
}
}  // namespace

KnowledgeDoc knowledge_from_json(const nlohmann::json& row) {
  if (!row.is_object()) throw ConfigError("knowledge row must be an object");
  KnowledgeDoc doc;
  doc.id = str_field(row, "id", true);
  doc.title = str_field(row, "title", false);
  doc.body = str_field(row, "body", false);
  if (row.contains("tags") && row["tags"].is_array()) {
    for (const auto& t : row["tags"]) {
      if (t.is_string()) doc.tags.push_back(t.get<std::string>());
    }
  }
  return doc;
}

TableSchema table_from_json(const nlohmann::json& row) {
  TableSchema t;
  t.table_name = str_field(row, "table_name", true);
  t.ddl = str_field(row, "ddl", false);
  t.description = str_field(row, "description", false);
  for (const auto& c : row.value("columns", nlohmann::json::array())) {
    t.columns.push_back({c.value("name", ""), c.value("type", ""), c.value("comment", "")});
  }
  return t;
}

TableHubEntry tablehub_from_json(const nlohmann::json& row) {
  if (!row.is_object()) throw ConfigError("TableHub row must be an object");
  TableHubEntry e;
  e.table_name = str_field(row, "table_name", true);
  e.ddl = str_field(row, "ddl", true);
  e.description = str_field(row, "description", false);
  if (row.contains("column_comments") && row["column_comments"].is_object()) {
    for (const auto& [name, comment] : row["column_comments"].items()) {
      if (comment.is_string()) e.column_comments[name] = comment.get<std::string>();
    }
  }
  return e;
}

}  // namespace nl2sql::retrieval
