#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nl2sql::cli {

/// Flags shared by every subcommand that talks to models or databases.
struct CommonFlags {
  std::string config;
  std::string out;
  std::string cassette;
  std::string cassette_mode;
};

struct IngestFlags {
  std::vector<std::string> inputs;
  std::string kind = "comments";
  std::string dialect;
  bool no_dedupe = false;
};

struct GenQueriesFlags {
  std::vector<std::string> inputs;
  std::string model;
  std::string template_id;
  std::string dialect;
  std::size_t parallelism = 0;
};

struct ExportSftFlags {
  std::string target;
  std::string input;
  std::string template_id;
  std::string schema_file;
  std::string dialect;
};

struct KbIndexFlags {
  std::string knowledge;
  std::string tables;
  std::string embedder;
  std::size_t dim = 0;
  std::string dialect;
};

struct KbQueryFlags {
  std::string index;
  std::string query;
  std::size_t k_knowledge = 0;
  std::size_t k_schema = 0;
};

struct RunFlags {
  std::string query;
  std::string index;
  std::string db;
  std::size_t parallelism = 0;
  std::size_t max_tasks = 0;
  std::size_t k_knowledge = 0;
  std::size_t k_schema = 0;
  std::string summary_mode;
  std::string planner_model;
  std::string sql_model;
  bool frozen_clock = false;
};

struct EvalFlags {
  std::string dataset;
  std::string modes = "exe";
  std::string db;
  std::string index;
  bool generate = false;
  std::string sql_model;
  std::string qse_model;
  std::string sse_model;
  std::size_t parallelism = 0;
  std::string order_policy;
  std::string method;
};

struct DemoFlags {
  std::string out;
  std::string record;
};

int corpus_ingest(const CommonFlags& common, const IngestFlags& flags);
int corpus_gen_queries(const CommonFlags& common, const GenQueriesFlags& flags);
int corpus_export_sft(const CommonFlags& common, const ExportSftFlags& flags);
int kb_index(const CommonFlags& common, const KbIndexFlags& flags);
int kb_query(const CommonFlags& common, const KbQueryFlags& flags);
int run(const CommonFlags& common, const RunFlags& flags);
int eval(const CommonFlags& common, const EvalFlags& flags);
int demo(const DemoFlags& flags);

}  // namespace nl2sql::cli
