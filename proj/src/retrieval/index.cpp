#include "nl2sql/retrieval/index.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/simd/kernels.hpp"
#include "nl2sql/sql/parser.hpp"

namespace nl2sql::retrieval {

TableSchema table_from_entry(const TableHubEntry& entry, sql::Dialect dialect) {
  const sql::ParsedStatement parsed = sql::parse_statement(entry.ddl, dialect);
  if (parsed.kind != sql::StatementKind::create_table || !parsed.create_table) {
    throw ConfigError("table '" + entry.table_name + "': ddl is not a CREATE TABLE statement");
  }
  TableSchema table;
  table.table_name = entry.table_name;
  table.ddl = entry.ddl;
  table.description = entry.description;
  std::set<std::string> seen;
  for (const sql::ColumnDef& col : parsed.create_table->columns) {
    if (!seen.insert(text::to_lower(col.name)).second) {
      throw ConfigError("table '" + entry.table_name + "': duplicate column name '" + col.name + "'");
    }
    auto comment = entry.column_comments.find(col.name);
    table.columns.push_back({col.name, col.type, comment == entry.column_comments.end() ? "" : comment->second});
  }
  return table;
}

std::string embedding_text(const KnowledgeDoc& doc) {
  std::string out = doc.title + "\n" + doc.body;
  if (!doc.tags.empty()) out += "\n" + text::join(doc.tags, " ");
  return out;
}

std::string embedding_text(const TableSchema& table) {
  std::string out = table.table_name + "\n" + table.description;
  for (const SchemaColumn& c : table.columns) {
    out += "\n" + c.name;
    if (!c.comment.empty()) out += " " + c.comment;
  }
  return out;
}

Index Index::build(const std::vector<KnowledgeDoc>& docs, const std::vector<TableHubEntry>& tables,
                   const Embedder& embedder, sql::Dialect dialect) {
  Index index;
  index.embedder_name_ = embedder.name();
  index.dim_ = embedder.dim();

  std::set<std::string> doc_ids;
  for (const KnowledgeDoc& doc : docs) {
    if (text::trim(doc.body).empty()) {
      ++index.stats_.rejected_docs;
      index.stats_.diagnostics.push_back("doc '" + doc.id + "': empty body");
      continue;
    }
    if (!doc_ids.insert(doc.id).second) {
      ++index.stats_.rejected_docs;
      index.stats_.diagnostics.push_back("doc '" + doc.id + "': duplicate id");
      continue;
    }
    const EmbeddingVector v = embedder.embed(embedding_text(doc));
    index.doc_vectors_.insert(index.doc_vectors_.end(), v.values.begin(), v.values.end());
    index.docs_.push_back(doc);
  }

  std::set<std::string> table_names;
  for (const TableHubEntry& entry : tables) {
    try {
      if (!table_names.insert(entry.table_name).second) throw ConfigError("duplicate table_name");
      TableSchema table = table_from_entry(entry, dialect);
      const EmbeddingVector v = embedder.embed(embedding_text(table));
      index.table_vectors_.insert(index.table_vectors_.end(), v.values.begin(), v.values.end());
      index.tables_.push_back(std::move(table));
    } catch (const Error& e) {
      ++index.stats_.rejected_tables;
      index.stats_.diagnostics.push_back("table '" + entry.table_name + "': " + e.what());
    }
  }
  index.stats_.docs = index.docs_.size();
  index.stats_.tables = index.tables_.size();
  return index;
}

void Index::save(const std::filesystem::path& path) const {
  std::vector<nlohmann::json> rows;
  rows.push_back({{"id", "__meta__"},
                  {"kind", "meta"},
                  {"vector", nlohmann::json::array()},
                  {"payload", {{"embedder", embedder_name_}, {"dim", dim_}, {"docs", docs_.size()},
                               {"tables", tables_.size()}}}});
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    std::vector<double> v(doc_vectors_.begin() + i * dim_, doc_vectors_.begin() + (i + 1) * dim_);
    rows.push_back({{"id", docs_[i].id}, {"kind", "knowledge"}, {"vector", v}, {"payload", to_json(docs_[i])}});
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    std::vector<double> v(table_vectors_.begin() + i * dim_, table_vectors_.begin() + (i + 1) * dim_);
    rows.push_back(
        {{"id", tables_[i].table_name}, {"kind", "schema"}, {"vector", v}, {"payload", to_json(tables_[i])}});
  }
  jsonl::write_file_atomic(path, jsonl::dump_lines(rows));
}

Index Index::load(const std::filesystem::path& path) {
  Index index;
  bool have_meta = false;
  for (const jsonl::Line& line : jsonl::read_lines(path)) {
    try {
      auto row = nlohmann::json::parse(line.text);
      const std::string kind = row.at("kind").get<std::string>();
      if (kind == "meta") {
        index.embedder_name_ = row.at("payload").at("embedder").get<std::string>();
        index.dim_ = row.at("payload").at("dim").get<std::size_t>();
        have_meta = true;
        continue;
      }
      if (!have_meta) throw ConfigError("missing meta header line");
      auto vec = row.at("vector").get<std::vector<double>>();
      if (vec.size() != index.dim_) throw ConfigError("vector dimension mismatch");
      if (kind == "knowledge") {
        index.docs_.push_back(knowledge_from_json(row.at("payload")));
        index.doc_vectors_.insert(index.doc_vectors_.end(), vec.begin(), vec.end());
      } else if (kind == "schema") {
        index.tables_.push_back(table_from_json(row.at("payload")));
        index.table_vectors_.insert(index.table_vectors_.end(), vec.begin(), vec.end());
      } else {
        throw ConfigError("unknown item kind '" + kind + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line.number) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line.number) + ": " + e.what());
    }
  }
  if (!have_meta) throw ConfigError(path.string() + ": not an index file (no meta header)");
  index.stats_.docs = index.docs_.size();
  index.stats_.tables = index.tables_.size();
  return index;
}

std::vector<std::size_t> top_k(const std::vector<double>& scores, const std::vector<const std::string*>& keys,
                               std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  k = std::min(k, order.size());
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return *keys[a] < *keys[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
  order.resize(k);
  return order;
}

RetrievalContext Index::retrieve(const std::string& query, std::size_t k_knowledge, std::size_t k_schema,
                                 const Embedder& embedder) const {
  if (text::trim(query).empty()) throw ConfigError("query must be non-empty");
  RetrievalContext ctx;
  ctx.query = query;

  const bool any_candidates = (k_knowledge > 0 && !docs_.empty()) || (k_schema > 0 && !tables_.empty());
  if (any_candidates) {
    if (embedder.name() != embedder_name_ || embedder.dim() != dim_) {
      throw ConfigError("index was built with embedder '" + embedder_name_ + "' but query uses '" + embedder.name() +
                        "'");
    }
    const EmbeddingVector q = embedder.embed(query);
    const simd::Kernels& kernels = simd::active();

    if (k_knowledge > 0 && !docs_.empty()) {
      std::vector<double> scores(docs_.size());
      kernels.dot_rows(q.values.data(), doc_vectors_.data(), docs_.size(), dim_, scores.data());
      std::vector<const std::string*> keys;
      for (const auto& d : docs_) keys.push_back(&d.id);
      for (std::size_t i : top_k(scores, keys, k_knowledge)) ctx.knowledge_hits.push_back({docs_[i].id, scores[i], docs_[i]});
    }
    if (k_schema > 0 && !tables_.empty()) {
      std::vector<double> scores(tables_.size());
      kernels.dot_rows(q.values.data(), table_vectors_.data(), tables_.size(), dim_, scores.data());
      std::vector<const std::string*> keys;
      for (const auto& t : tables_) keys.push_back(&t.table_name);
      for (std::size_t i : top_k(scores, keys, k_schema)) {
        ctx.schema_hits.push_back({tables_[i].table_name, scores[i], tables_[i]});
      }
    }
  }
  ctx.rendered = render_context(ctx.query, ctx.knowledge_hits, ctx.schema_hits);
  return ctx;
}

}  // namespace nl2sql::retrieval
