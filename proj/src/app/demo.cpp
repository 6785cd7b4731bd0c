#include "nl2sql/app/demo.hpp"

#include <map>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/jsonl.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/judge/judge.hpp"
#include "nl2sql/llm/cassette.hpp"
#include "nl2sql/llm/scripted.hpp"
#include "nl2sql/retrieval/embedder.hpp"
#include "nl2sql/retrieval/index.hpp"
#include "nl2sql/workflow/executor.hpp"
#include "nl2sql/workflow/planner.hpp"

namespace nl2sql::assets {
const std::map<std::string, std::string_view>& demo();
}

namespace nl2sql::app {
namespace {

constexpr std::size_t kKnowledgeK = 3;
constexpr std::size_t kSchemaK = 5;

std::vector<nlohmann::json> json_rows(std::string_view text) {
  std::vector<nlohmann::json> rows;
  for (auto line : text::split_lines(text))
    if (!text::trim(line).empty()) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

llm::ModelRef demo_model(std::string model_id) { return {"demo", std::move(model_id), {}}; }

}  // namespace

std::string_view demo_asset(std::string_view name) {
  const auto& all = assets::demo();
  auto it = all.find(std::string(name));
  if (it == all.end()) throw ConfigError("no bundled demo asset named '" + std::string(name) + "'");
  return it->second;
}

DemoArtifacts run_demo(const DemoOptions& options) {
  const auto db_path = options.work_dir / "shop.db";
  sqlexec::apply_seed(demo_asset("shop.sql"), db_path);
  const sqlexec::ConnectionSpec db{sqlexec::Engine::sqlite, db_path.string()};

  std::vector<retrieval::KnowledgeDoc> docs;
  for (const auto& row : json_rows(demo_asset("knowledge.jsonl"))) docs.push_back(retrieval::knowledge_from_json(row));
  std::vector<retrieval::TableHubEntry> tables;
  for (const auto& row : json_rows(demo_asset("tables.jsonl"))) tables.push_back(retrieval::tablehub_from_json(row));
  const retrieval::HashingEmbedder embedder;
  const auto index = retrieval::Index::build(docs, tables, embedder, sql::Dialect::sqlite);

  std::shared_ptr<llm::Provider> provider;
  if (options.record_cassette) {
    std::filesystem::remove(*options.record_cassette);
    auto scripted = std::make_shared<llm::ScriptedProvider>(
        llm::ScriptedProvider::from_json_text(demo_asset("scripted_rules.json"), "demo"));
    provider = std::make_shared<llm::CassetteProvider>(llm::CassetteMode::record, *options.record_cassette, scripted);
  } else {
    provider = std::make_shared<llm::CassetteProvider>(llm::CassetteProvider::parse(demo_asset("cassette.jsonl")));
  }

  const std::string query(kDemoQuery);
  const auto context = index.retrieve(query, kKnowledgeK, kSchemaK, embedder);
  const auto plan = workflow::plan(query, context, demo_model("demo-generator"), *provider);

  const FrozenClock clock;
  workflow::ExecuteOptions exec;
  exec.parallelism = 1;
  exec.summary_mode = workflow::SummaryMode::llm;
  exec.summary_model = demo_model("demo-generator");
  exec.reasoning_model = demo_model("demo-generator");
  exec.clock = &clock;
  const auto outcome = workflow::execute(plan, demo_model("demo-sqlllm"), *provider, db, exec);

  std::vector<judge::EvalItem> items;
  for (const auto& row : json_rows(demo_asset("eval.jsonl"))) {
    auto item = judge::item_from_json(row);
    item.context = index.retrieve(item.query, kKnowledgeK, kSchemaK, embedder);
    items.push_back(std::move(item));
  }
  judge::EvalConfig eval;
  eval.modes = {judge::Mode::exe, judge::Mode::qse, judge::Mode::sse};
  eval.db = db;
  eval.qse_model = demo_model("demo-judge");
  eval.sse_model = demo_model("demo-judge");
  eval.qse_provider = provider.get();
  eval.sse_provider = provider.get();
  eval.method = "nl2sql (demo)";
  const auto report = judge::evaluate_dataset(items, eval);

  DemoArtifacts out;
  out.context_json = jsonl::dump_pretty(retrieval::to_json(context));
  out.plan_json = jsonl::dump_pretty(workflow::to_json(plan));
  out.outcome_json = jsonl::dump_pretty(workflow::to_json(outcome));
  out.trace_jsonl = outcome.trace.to_jsonl();
  out.report_json = jsonl::dump_pretty(judge::to_json(report));
  out.report_txt = judge::render_report_table(report);
  out.answer = outcome.answer;
  return out;
}

}  // namespace nl2sql::app
