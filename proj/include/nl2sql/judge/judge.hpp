#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nl2sql/judge/verdict.hpp"
#include "nl2sql/llm/provider.hpp"
#include "nl2sql/llm/templates.hpp"
#include "nl2sql/sqlexec/database.hpp"

namespace nl2sql::judge {

/// automatic: order matters exactly when the gold SQL has a top-level ORDER BY.
enum class OrderPolicy { automatic, always, never };

OrderPolicy parse_order_policy(std::string_view name);
std::string_view to_string(OrderPolicy policy) noexcept;

struct ExeOptions {
  sqlexec::ExecOptions exec;
  OrderPolicy order_policy = OrderPolicy::automatic;
};

/// Whether EXE compares row order for this gold statement.
bool order_sensitive(std::string_view sql_gold, OrderPolicy policy, sql::Dialect dialect = sql::Dialect::sqlite);

/// The item's own db_ref when present, else `fallback`; ConfigError when neither.
sqlexec::ConnectionSpec resolve_db(const EvalItem& item, const std::optional<sqlexec::ConnectionSpec>& fallback);

/// Executes gold then generated SQL and compares canonical results.
/// Gold failure → skipped (dataset_defect); generated failure → failed with
/// the engine diagnostic. Throws DbConnectionError when the database cannot
/// be opened.
Verdict exe_score(const EvalItem& item, const sqlexec::ConnectionSpec& db, const ExeOptions& options = {});

struct JudgeOptions {
  llm::RetryPolicy retry;
  const llm::TemplateRegistry* templates = nullptr;
  std::string qse_template = "judge.qse.v1";
  std::string sse_template = "judge.sse.v1";
  std::string repair_template = "judge.repair.v1";
};

/// Asks the judge, then once more with a repair prompt if the reply has no
/// verdict line; still none → failed with parse_failure. Provider failure →
/// skipped with judge_unavailable.
Verdict qse_score(const EvalItem& item, const llm::ModelRef& model, llm::Provider& provider,
                  const JudgeOptions& options = {});
Verdict sse_score(const EvalItem& item, const llm::ModelRef& model, llm::Provider& provider,
                  const JudgeOptions& options = {});

/// Shared verdict handling for a first judge reply (exposed for testing).
Verdict judge_reply(Mode mode, const std::string& first_reply, const llm::ModelRef& model, llm::Provider& provider,
                    const JudgeOptions& options);

struct ModeCounts {
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;

  /// 100·passed/(passed+failed); empty when the denominator is zero.
  std::optional<double> percentage() const;
};

struct ItemVerdicts {
  std::string id;
  std::map<Mode, Verdict> verdicts;
};

struct EvalReport {
  std::string method = "nl2sql";
  std::vector<Mode> modes;  // in evaluation order
  std::map<Mode, ModeCounts> counts;
  std::vector<ItemVerdicts> items;  // dataset order
};

/// Deterministic fold of item-ordered verdicts into counts.
EvalReport aggregate(std::vector<ItemVerdicts> items, const std::vector<Mode>& modes, std::string method = "nl2sql");

struct EvalConfig {
  std::vector<Mode> modes = {Mode::exe};
  std::optional<sqlexec::ConnectionSpec> db;  // default when an item has no db_ref
  ExeOptions exe;
  JudgeOptions judge;
  std::optional<llm::ModelRef> qse_model;
  std::optional<llm::ModelRef> sse_model;
  llm::Provider* qse_provider = nullptr;
  llm::Provider* sse_provider = nullptr;
  std::size_t parallelism = 1;
  std::string method = "nl2sql";
};

/// Scores every item in every mode (items concurrently up to
/// `parallelism`). Items lacking a mode's fields are skipped for that mode.
/// An unreachable database aborts the batch with DbConnectionError.
EvalReport evaluate_dataset(const std::vector<EvalItem>& items, const EvalConfig& config);

nlohmann::json to_json(const EvalReport& report);
/// Header "Method | EXE (%) | QSE (%) | SSE (%)" style row for the evaluated
/// modes, one decimal, "n/a" for undefined percentages, followed by counts.
std::string render_report_table(const EvalReport& report);

/// Formats a percentage with one decimal ("86.5").
std::string format_percentage(double value);

}  // namespace nl2sql::judge
