#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitConfig = 78;

int report_error(std::string_view kind, std::string_view message, int code) {
  std::cerr << nl2sql::jsonl::dump({{"error", kind}, {"message", nl2sql::text::single_line(message)}}) << std::endl;
  return code;
}

void add_common(CLI::App* cmd, nl2sql::cli::CommonFlags& common, bool needs_out) {
  cmd->add_option("--config", common.config, "TOML configuration file");
  auto* out = cmd->add_option("--out", common.out, "Output directory for all artifacts");
  if (needs_out) out->required();
  cmd->add_option("--cassette", common.cassette, "Cassette file (overrides [cassette].path)");
  cmd->add_option("--cassette-mode", common.cassette_mode, "record, replay or passthrough (overrides [cassette].mode)")
      ->check(CLI::IsMember({"record", "replay", "passthrough"}));
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nl2sql::cli;
  CLI::App app{"Text-to-SQL toolkit: corpus building, retrieval, workflow execution and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nl2sql 0.1.0");

  CommonFlags common;
  IngestFlags ingest;
  GenQueriesFlags gen;
  ExportSftFlags sft;
  KbIndexFlags kbi;
  KbQueryFlags kbq;
  RunFlags run_flags;
  EvalFlags eval_flags;
  DemoFlags demo_flags;
  std::function<int()> action;

  auto* corpus = app.add_subcommand("corpus", "Build SQL corpora and fine-tuning datasets");
  corpus->require_subcommand(1);

  auto* c_ingest = corpus->add_subcommand("ingest", "Validate and dedupe <SQL, COMMENT> or raw SQL JSONL files");
  add_common(c_ingest, common, true);
  c_ingest->add_option("--input", ingest.inputs, "Input JSONL file (repeatable)")->required();
  c_ingest->add_option("--kind", ingest.kind, "comments (SQL with comment) or raw (SQL only)")
      ->check(CLI::IsMember({"comments", "raw"}));
  c_ingest->add_option("--dialect", ingest.dialect, "SQL dialect: ansi, sqlite or mysql");
  c_ingest->add_flag("--no-dedupe", ingest.no_dedupe, "Keep statements that normalize to the same text");
  c_ingest->callback([&] { action = [&] { return corpus_ingest(common, ingest); }; });

  auto* c_gen = corpus->add_subcommand("gen-queries", "Generate questions for raw SQL with the reverse-generation model");
  add_common(c_gen, common, true);
  c_gen->add_option("--input", gen.inputs, "Raw SQL JSONL file (repeatable)")->required();
  c_gen->add_option("--model", gen.model, "Provider name (overrides [corpus].revllm_model)");
  c_gen->add_option("--template", gen.template_id, "Prompt template id (default revllm.v1)");
  c_gen->add_option("--dialect", gen.dialect, "SQL dialect: ansi, sqlite or mysql");
  c_gen->add_option("--parallelism", gen.parallelism, "Concurrent model calls")->check(CLI::PositiveNumber);
  c_gen->callback([&] { action = [&] { return corpus_gen_queries(common, gen); }; });

  auto* c_sft = corpus->add_subcommand("export-sft", "Export a prompt/completion JSONL dataset");
  add_common(c_sft, common, true);
  c_sft->add_option("--target", sft.target, "revllm (SQL to comment) or sqlllm (question to SQL)")
      ->required()
      ->check(CLI::IsMember({"revllm", "sqlllm"}));
  c_sft->add_option("--input", sft.input, "SQL-comment JSONL (revllm) or query-SQL pairs JSONL (sqlllm)")->required();
  c_sft->add_option("--template", sft.template_id, "Prompt template id");
  c_sft->add_option("--schema-file", sft.schema_file, "Schema text injected into sqlllm prompts");
  c_sft->add_option("--dialect", sft.dialect, "SQL dialect: ansi, sqlite or mysql");
  c_sft->callback([&] { action = [&] { return corpus_export_sft(common, sft); }; });

  auto* kb = app.add_subcommand("kb", "Knowledge base and TableHub index");
  kb->require_subcommand(1);

  auto* k_index = kb->add_subcommand("index", "Embed knowledge snippets and table schemas into an index file");
  add_common(k_index, common, true);
  k_index->add_option("--knowledge", kbi.knowledge, "Knowledge JSONL {id, title, body, tags}");
  k_index->add_option("--tables", kbi.tables, "TableHub JSONL {table_name, ddl, description, column_comments}");
  k_index->add_option("--embedder", kbi.embedder, "hashing or http (overrides [retrieval].embedder)")
      ->check(CLI::IsMember({"hashing", "http"}));
  k_index->add_option("--dim", kbi.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  k_index->add_option("--dialect", kbi.dialect, "DDL dialect: ansi, sqlite or mysql");
  k_index->callback([&] { action = [&] { return kb_index(common, kbi); }; });

  auto* k_query = kb->add_subcommand("query", "Retrieve the context for a question");
  add_common(k_query, common, true);
  k_query->add_option("--index", kbq.index, "Index file (overrides [retrieval].index)");
  k_query->add_option("--query", kbq.query, "Question text")->required();
  k_query->add_option("--k-knowledge", kbq.k_knowledge, "Knowledge hits")->check(CLI::PositiveNumber);
  k_query->add_option("--k-schema", kbq.k_schema, "Schema hits")->check(CLI::PositiveNumber);
  k_query->callback([&] { action = [&] { return kb_query(common, kbq); }; });

  auto* r = app.add_subcommand("run", "Plan and execute a question as a task graph");
  add_common(r, common, true);
  r->add_option("--query", run_flags.query, "Question text")->required();
  r->add_option("--index", run_flags.index, "Index file (overrides [retrieval].index)");
  r->add_option("--db", run_flags.db, "Database: sqlite:PATH or PATH (overrides [exec].connection)");
  r->add_option("--parallelism", run_flags.parallelism, "Concurrent tasks")->check(CLI::PositiveNumber);
  r->add_option("--max-tasks", run_flags.max_tasks, "Plan size limit")->check(CLI::PositiveNumber);
  r->add_option("--k-knowledge", run_flags.k_knowledge, "Knowledge hits")->check(CLI::PositiveNumber);
  r->add_option("--k-schema", run_flags.k_schema, "Schema hits")->check(CLI::PositiveNumber);
  r->add_option("--summary-mode", run_flags.summary_mode, "llm or concat")->check(CLI::IsMember({"llm", "concat"}));
  r->add_option("--planner-model", run_flags.planner_model, "Provider name for planning");
  r->add_option("--sql-model", run_flags.sql_model, "Provider name for SQL generation");
  r->add_flag("--frozen-clock", run_flags.frozen_clock, "Report zero elapsed times (implied by replay)");
  r->callback([&] { action = [&] { return run(common, run_flags); }; });

  auto* e = app.add_subcommand("eval", "Score generated SQL with EXE, QSE and SSE");
  add_common(e, common, true);
  e->add_option("--dataset", eval_flags.dataset, "Eval JSONL {id, query, sql_gen?, sql_gold?, db_ref?, context?}")
      ->required();
  e->add_option("--modes", eval_flags.modes, "Comma-separated subset of exe,qse,sse");
  e->add_option("--db", eval_flags.db, "Default database for items without db_ref");
  e->add_option("--index", eval_flags.index, "Index used to build judge and generation context");
  e->add_flag("--generate", eval_flags.generate, "Generate missing sql_gen with the SQL model first");
  e->add_option("--sql-model", eval_flags.sql_model, "Provider name for --generate");
  e->add_option("--qse-model", eval_flags.qse_model, "Provider name for the QSE judge");
  e->add_option("--sse-model", eval_flags.sse_model, "Provider name for the SSE judge");
  e->add_option("--parallelism", eval_flags.parallelism, "Items scored concurrently")->check(CLI::PositiveNumber);
  e->add_option("--order-policy", eval_flags.order_policy, "auto, always or never")
      ->check(CLI::IsMember({"auto", "always", "never"}));
  e->add_option("--method", eval_flags.method, "Row label in the report table");
  e->callback([&] { action = [&] { return eval(common, eval_flags); }; });

  auto* d = app.add_subcommand("demo", "Run the bundled best-selling-products scenario end to end");
  d->add_option("--out", demo_flags.out, "Directory for the demo database and artifacts");
  d->add_option("--record", demo_flags.record, "Re-record the demo cassette from the scripted rules to this file");
  d->callback([&] { action = [&] { return demo(demo_flags); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << app.help() << '\n';
    return report_error("usage", err.what(), kExitUsage);
  }

  try {
    return action();
  } catch (const nl2sql::ConfigError& err) {
    return report_error(err.kind(), err.what(), kExitConfig);
  } catch (const nl2sql::Error& err) {
    return report_error(err.kind(), err.what(), 1);
  } catch (const std::exception& err) {
    return report_error("internal", err.what(), 1);
  }
}
