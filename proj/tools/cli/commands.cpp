#include "commands.hpp"

#include <iostream>
#include <unistd.h>

#include "nl2sql/app/config.hpp"
#include "nl2sql/app/demo.hpp"
#include "nl2sql/app/runtime.hpp"
#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/corpus/corpus.hpp"
#include "nl2sql/judge/judge.hpp"
#include "nl2sql/retrieval/index.hpp"
#include "nl2sql/workflow/executor.hpp"
#include "nl2sql/workflow/planner.hpp"

namespace nl2sql::cli {
namespace {

namespace fs = std::filesystem;

app::Config load(const CommonFlags& common) {
  app::Config config = common.config.empty() ? app::Config{} : app::load_config(common.config);
  if (!common.cassette.empty()) config.cassette.path = common.cassette;
  if (!common.cassette_mode.empty()) config.cassette.mode = llm::parse_cassette_mode(common.cassette_mode);
  if (config.cassette.mode != llm::CassetteMode::passthrough && config.cassette.path.empty())
    throw ConfigError("cassette mode " + common.cassette_mode + " needs --cassette or [cassette].path");
  return config;
}

void write(const fs::path& dir, const std::string& name, std::string_view content) {
  jsonl::write_file_atomic(dir / name, content);
}

std::vector<fs::path> paths(const std::vector<std::string>& inputs) { return {inputs.begin(), inputs.end()}; }

template <class T>
void override_if(T& target, const T& value, const T& unset = T{}) {
  if (value != unset) target = value;
}

std::vector<nlohmann::json> read_json_rows(const fs::path& path) {
  std::vector<nlohmann::json> rows;
  for (const auto& line : jsonl::read_lines(path)) {
    try {
      rows.push_back(nlohmann::json::parse(line.text));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line.number) + ": " + e.what());
    }
  }
  return rows;
}

retrieval::Index load_index(const app::Config& config, const std::string& flag) {
  const fs::path path = flag.empty() ? config.retrieval.index : fs::path(flag);
  if (path.empty()) throw ConfigError("no index given (use --index or [retrieval].index)");
  return retrieval::Index::load(path);
}

sqlexec::ExecOptions exec_options(const app::Config& config) {
  sqlexec::ExecOptions o;
  o.row_limit = config.exec.row_limit;
  o.timeout = std::chrono::milliseconds(config.exec.timeout_ms);
  o.dialect = config.exec.dialect;
  return o;
}

}  // namespace

int corpus_ingest(const CommonFlags& common, const IngestFlags& flags) {
  auto config = load(common);
  if (!flags.dialect.empty()) config.corpus.dialect = sql::parse_dialect(flags.dialect);
  const fs::path out(common.out);
  nlohmann::json stats;
  std::size_t written = 0;
  std::size_t duplicates = 0;
  if (flags.kind == "raw") {
    auto result = corpus::ingest_raw_sql(paths(flags.inputs), config.corpus.dialect);
    auto records = flags.no_dedupe ? result.records : corpus::dedupe(result.records, config.corpus.dialect);
    duplicates = result.records.size() - records.size();
    corpus::write_jsonl(out / "records.jsonl", records);
    written = records.size();
    stats = corpus::to_json(result.stats);
  } else {
    auto result = corpus::ingest_sql_comments(paths(flags.inputs), config.corpus.dialect);
    auto records = flags.no_dedupe ? result.records : corpus::dedupe(result.records, config.corpus.dialect);
    duplicates = result.records.size() - records.size();
    corpus::write_jsonl(out / "records.jsonl", records);
    written = records.size();
    stats = corpus::to_json(result.stats);
  }
  stats["duplicates"] = duplicates;
  stats["written"] = written;
  write(out, "ingest_stats.json", jsonl::dump_pretty(stats));
  std::cout << "read " << stats["read"] << ", kept " << stats["kept"] << ", duplicates " << duplicates
            << ", written " << written << " -> " << (out / "records.jsonl").string() << "\n";
  return 0;
}

int corpus_gen_queries(const CommonFlags& common, const GenQueriesFlags& flags) {
  auto config = load(common);
  if (!flags.dialect.empty()) config.corpus.dialect = sql::parse_dialect(flags.dialect);
  override_if(config.corpus.revllm_model, flags.model);
  override_if(config.corpus.revllm_template, flags.template_id);
  override_if(config.corpus.parallelism, flags.parallelism);
  const auto model = config.model(config.corpus.revllm_model, "corpus.revllm_model");
  auto rt = app::make_runtime(config);

  auto ingested = corpus::ingest_raw_sql(paths(flags.inputs), config.corpus.dialect);
  corpus::GenerationOptions options;
  options.template_id = config.corpus.revllm_template;
  options.parallelism = config.corpus.parallelism;
  options.templates = rt.templates.get();
  auto result = corpus::generate_queries(ingested.records, model, *rt.provider, options);

  const fs::path out(common.out);
  corpus::write_jsonl(out / "pairs.jsonl", result.pairs);
  auto stats = corpus::to_json(result.stats);
  stats["ingest"] = corpus::to_json(ingested.stats);
  write(out, "generation_stats.json", jsonl::dump_pretty(stats));
  std::cout << "generated " << result.stats.generated << " of " << result.stats.input << " (empty "
            << result.stats.dropped_empty << ", failed " << result.stats.failures.size() << ") -> "
            << (out / "pairs.jsonl").string() << "\n";
  return 0;
}

int corpus_export_sft(const CommonFlags& common, const ExportSftFlags& flags) {
  auto config = load(common);
  if (!flags.dialect.empty()) config.corpus.dialect = sql::parse_dialect(flags.dialect);
  auto rt = app::make_runtime(config);
  const fs::path out(common.out);
  nlohmann::json stats;
  std::vector<corpus::SftExample> examples;
  if (flags.target == "revllm") {
    auto ingested = corpus::ingest_sql_comments({flags.input}, config.corpus.dialect);
    const auto records = corpus::dedupe(ingested.records, config.corpus.dialect);
    const auto template_id = flags.template_id.empty() ? config.corpus.revllm_template : flags.template_id;
    examples = corpus::build_revllm_sft(records, template_id, *rt.templates);
    stats = {{"input", ingested.stats.read},
             {"rejected", ingested.stats.rejected()},
             {"duplicates", ingested.records.size() - records.size()},
             {"template_id", template_id}};
  } else {
    const auto pairs = corpus::read_pairs(flags.input);
    const auto schema = flags.schema_file.empty() ? std::string() : jsonl::read_file(flags.schema_file);
    const auto template_id = flags.template_id.empty() ? config.corpus.sqlllm_template : flags.template_id;
    auto built = corpus::build_sqlllm_sft(pairs, template_id, schema, *rt.templates, config.corpus.dialect);
    examples = std::move(built.examples);
    stats = {{"input", pairs.size()},
             {"rejected", 0},
             {"duplicates", built.duplicates},
             {"template_id", built.template_id}};
  }
  stats["exported"] = examples.size();
  corpus::write_sft(out / "sft.jsonl", examples);
  write(out, "export_stats.json", jsonl::dump_pretty(stats));
  std::cout << "exported " << examples.size() << " examples -> " << (out / "sft.jsonl").string() << "\n";
  return 0;
}

int kb_index(const CommonFlags& common, const KbIndexFlags& flags) {
  auto config = load(common);
  override_if(config.retrieval.embedder, flags.embedder);
  override_if(config.retrieval.dim, flags.dim);
  if (!flags.dialect.empty()) config.retrieval.dialect = sql::parse_dialect(flags.dialect);
  if (flags.knowledge.empty() && flags.tables.empty()) throw ConfigError("kb index needs --knowledge and/or --tables");

  std::vector<retrieval::KnowledgeDoc> docs;
  if (!flags.knowledge.empty())
    for (const auto& row : read_json_rows(flags.knowledge)) docs.push_back(retrieval::knowledge_from_json(row));
  std::vector<retrieval::TableHubEntry> tables;
  if (!flags.tables.empty())
    for (const auto& row : read_json_rows(flags.tables)) tables.push_back(retrieval::tablehub_from_json(row));

  const auto embedder = app::make_embedder(config.retrieval);
  const auto index = retrieval::Index::build(docs, tables, *embedder, config.retrieval.dialect);
  const fs::path out(common.out);
  index.save(out / "index.jsonl");
  const auto& s = index.stats();
  write(out, "index_stats.json",
        jsonl::dump_pretty({{"docs", s.docs},
                            {"tables", s.tables},
                            {"rejected_docs", s.rejected_docs},
                            {"rejected_tables", s.rejected_tables},
                            {"diagnostics", s.diagnostics},
                            {"embedder", index.embedder_name()},
                            {"dim", index.dim()}}));
  std::cout << "indexed " << s.docs << " knowledge docs and " << s.tables << " tables ("
            << s.rejected_docs + s.rejected_tables << " rejected) -> " << (out / "index.jsonl").string() << "\n";
  return 0;
}

int kb_query(const CommonFlags& common, const KbQueryFlags& flags) {
  auto config = load(common);
  override_if(config.retrieval.k_knowledge, flags.k_knowledge);
  override_if(config.retrieval.k_schema, flags.k_schema);
  const auto index = load_index(config, flags.index);
  const auto embedder = app::make_embedder(config.retrieval);
  const auto context = index.retrieve(flags.query, config.retrieval.k_knowledge, config.retrieval.k_schema, *embedder);
  write(common.out, "context.json", jsonl::dump_pretty(retrieval::to_json(context)));
  std::cout << context.rendered;
  return 0;
}

int run(const CommonFlags& common, const RunFlags& flags) {
  auto config = load(common);
  override_if(config.workflow.parallelism, flags.parallelism);
  override_if(config.workflow.max_tasks, flags.max_tasks);
  override_if(config.retrieval.k_knowledge, flags.k_knowledge);
  override_if(config.retrieval.k_schema, flags.k_schema);
  override_if(config.workflow.planner_model, flags.planner_model);
  override_if(config.workflow.sql_model, flags.sql_model);
  if (!flags.summary_mode.empty()) config.workflow.summary_mode = workflow::parse_summary_mode(flags.summary_mode);
  if (!flags.db.empty()) config.exec.connection = flags.db;
  if (config.exec.connection.empty()) throw ConfigError("no database given (use --db or [exec].connection)");

  const auto planner = config.model(config.workflow.planner_model, "workflow.planner_model");
  const auto sql_model = config.model(config.workflow.sql_model, "workflow.sql_model");
  auto rt = app::make_runtime(config);

  retrieval::RetrievalContext context;
  context.query = flags.query;
  if (!flags.index.empty() || !config.retrieval.index.empty()) {
    const auto index = load_index(config, flags.index);
    context = index.retrieve(flags.query, config.retrieval.k_knowledge, config.retrieval.k_schema, *rt.embedder);
  }

  workflow::PlanOptions plan_options;
  plan_options.max_tasks = config.workflow.max_tasks;
  plan_options.templates = rt.templates.get();
  const auto plan = workflow::plan(flags.query, context, planner, *rt.provider, plan_options);

  const FrozenClock frozen;
  workflow::ExecuteOptions options;
  options.parallelism = config.workflow.parallelism;
  options.exec = exec_options(config);
  options.summary_mode = config.workflow.summary_mode;
  if (!config.workflow.summary_model.empty())
    options.summary_model = config.model(config.workflow.summary_model, "workflow.summary_model");
  if (!config.workflow.reasoning_model.empty())
    options.reasoning_model = config.model(config.workflow.reasoning_model, "workflow.reasoning_model");
  options.templates = rt.templates.get();
  if (flags.frozen_clock || config.cassette.mode == llm::CassetteMode::replay) options.clock = &frozen;
  const auto outcome =
      workflow::execute(plan, sql_model, *rt.provider, sqlexec::ConnectionSpec::parse(config.exec.connection), options);

  const fs::path out(common.out);
  write(out, "context.json", jsonl::dump_pretty(retrieval::to_json(context)));
  write(out, "plan.json", jsonl::dump_pretty(workflow::to_json(plan)));
  write(out, "outcome.json", jsonl::dump_pretty(workflow::to_json(outcome)));
  write(out, "trace.jsonl", outcome.trace.to_jsonl());
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << outcome.answer << "\n";
  return 0;
}

int eval(const CommonFlags& common, const EvalFlags& flags) {
  auto config = load(common);
  override_if(config.judge.qse_model, flags.qse_model);
  override_if(config.judge.sse_model, flags.sse_model);
  override_if(config.judge.parallelism, flags.parallelism);
  override_if(config.judge.method, flags.method);
  override_if(config.workflow.sql_model, flags.sql_model);
  if (!flags.order_policy.empty()) config.exec.order_policy = judge::parse_order_policy(flags.order_policy);
  if (!flags.db.empty()) config.exec.connection = flags.db;

  judge::EvalConfig eval;
  eval.modes.clear();
  for (const auto& m : text::split_lines(text::replace_all(flags.modes, ",", "\n")))
    if (!text::trim(m).empty()) eval.modes.push_back(judge::parse_mode(m));
  const auto has = [&](judge::Mode m) { return std::find(eval.modes.begin(), eval.modes.end(), m) != eval.modes.end(); };
  if (has(judge::Mode::qse)) eval.qse_model = config.model(config.judge.qse_model, "judge.qse_model");
  if (has(judge::Mode::sse)) eval.sse_model = config.model(config.judge.sse_model, "judge.sse_model");
  auto rt = app::make_runtime(config);
  eval.qse_provider = rt.provider.get();
  eval.sse_provider = rt.provider.get();
  if (!config.exec.connection.empty()) eval.db = sqlexec::ConnectionSpec::parse(config.exec.connection);
  eval.exe.exec = exec_options(config);
  eval.exe.order_policy = config.exec.order_policy;
  eval.judge.templates = rt.templates.get();
  eval.parallelism = config.judge.parallelism;
  eval.method = config.judge.method;

  std::vector<judge::EvalItem> items;
  std::size_t line = 0;
  for (const auto& row : read_json_rows(flags.dataset)) {
    ++line;
    try {
      items.push_back(judge::item_from_json(row));
    } catch (const ConfigError& e) {
      throw ConfigError(flags.dataset + " item " + std::to_string(line) + ": " + e.what());
    }
  }

  std::optional<retrieval::Index> index;
  if (!flags.index.empty() || !config.retrieval.index.empty()) index = load_index(config, flags.index);
  for (auto& item : items) {
    if (!item.context && index && !text::trim(item.query).empty())
      item.context = index->retrieve(item.query, config.retrieval.k_knowledge, config.retrieval.k_schema, *rt.embedder);
  }

  std::vector<std::string> warnings;
  if (flags.generate) {
    const auto sql_model = config.model(config.workflow.sql_model, "workflow.sql_model");
    for (auto& item : items) {
      if (item.sql_gen || text::trim(item.query).empty()) continue;
      try {
        item.sql_gen = workflow::generate_sql(item.query, item.context.value_or(retrieval::RetrievalContext{}),
                                              sql_model, *rt.provider, {}, rt.templates.get());
      } catch (const Error& e) {
        warnings.push_back("item " + item.id + ": generation failed: " + text::single_line(e.what()));
      }
    }
    std::vector<nlohmann::json> rows;
    for (const auto& item : items) rows.push_back(judge::to_json(item));
    write(common.out, "items.jsonl", jsonl::dump_lines(rows));
  }

  const auto report = judge::evaluate_dataset(items, eval);
  write(common.out, "report.json", jsonl::dump_pretty(judge::to_json(report)));
  const auto table = judge::render_report_table(report);
  write(common.out, "report.txt", table);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << table;
  return 0;
}

int demo(const DemoFlags& flags) {
  fs::path work = flags.out;
  const bool temporary = work.empty();
  if (temporary) work = fs::temp_directory_path() / ("nl2sql-demo-" + std::to_string(::getpid()));
  fs::create_directories(work);

  app::DemoOptions options;
  options.work_dir = work;
  if (!flags.record.empty()) options.record_cassette = fs::path(flags.record);
  app::DemoArtifacts artifacts;
  try {
    artifacts = app::run_demo(options);
  } catch (...) {
    if (temporary) fs::remove_all(work);
    throw;
  }
  if (temporary) {
    fs::remove_all(work);
  } else {
    write(work, "context.json", artifacts.context_json);
    write(work, "plan.json", artifacts.plan_json);
    write(work, "outcome.json", artifacts.outcome_json);
    write(work, "trace.jsonl", artifacts.trace_jsonl);
    write(work, "report.json", artifacts.report_json);
    write(work, "report.txt", artifacts.report_txt);
  }
  std::cout << "Question: " << app::kDemoQuery << "\n\n" << artifacts.answer << "\n\n" << artifacts.report_txt;
  return 0;
}

}  // namespace nl2sql::cli
