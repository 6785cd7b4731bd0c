#pragma once

#include <optional>
#include <string>

#include "nl2sql/common/clock.hpp"
#include "nl2sql/llm/provider.hpp"
#include "nl2sql/llm/templates.hpp"
#include "nl2sql/sqlexec/database.hpp"
#include "nl2sql/workflow/scheduler.hpp"
#include "nl2sql/workflow/types.hpp"

namespace nl2sql::workflow {

enum class SummaryMode { llm, concat };

SummaryMode parse_summary_mode(std::string_view name);
std::string_view to_string(SummaryMode mode) noexcept;

struct ExecuteOptions {
  std::size_t parallelism = 1;
  sqlexec::ExecOptions exec;
  SummaryMode summary_mode = SummaryMode::concat;
  std::optional<llm::ModelRef> summary_model;    // sql model when unset
  std::optional<llm::ModelRef> reasoning_model;  // sql model when unset
  std::size_t dependency_rows = 20;  // rows of each dependency result shown in prompts
  llm::RetryPolicy retry;
  const Clock* clock = nullptr;
  const llm::TemplateRegistry* templates = nullptr;
  ReplanHook replan;  // off unless set
};

/// Strips a fenced code block (```sql ... ```) and surrounding whitespace.
std::string extract_sql(std::string_view reply);

/// Renders dependency results for prompt injection, `max_rows` rows each.
std::string render_dependencies(const TaskNode& task, const DependencyResults& deps, std::size_t max_rows);

/// Runs a validated plan: per sql task, render the prompt with the
/// instruction, context and dependency results, ask the SQL model, execute the
/// SQL on a fresh connection; reasoning tasks answer in text. Then summarize.
WorkflowOutcome execute(const WorkflowPlan& plan, const llm::ModelRef& sql_model, llm::Provider& provider,
                        const sqlexec::ConnectionSpec& db, const ExecuteOptions& options = {});

struct SummaryResult {
  std::string answer;
  bool fell_back = false;
  std::string warning;
};

/// concat: every task's result in plan order. llm: provider completion over a
/// summary prompt; a provider failure falls back to concat with a warning.
/// Throws WorkflowError when no task finished.
SummaryResult summarize(const std::string& query, const std::vector<TaskNode>& tasks,
                        const std::map<std::string, TaskResult>& results, SummaryMode mode,
                        const llm::ModelRef* model, llm::Provider* provider, const ExecuteOptions& options = {});

/// One-shot SQL for a whole question (used when an eval item lacks sql_gen).
std::string generate_sql(const std::string& query, const retrieval::RetrievalContext& context,
                         const llm::ModelRef& model, llm::Provider& provider, const llm::RetryPolicy& retry = {},
                         const llm::TemplateRegistry* templates = nullptr);

}  // namespace nl2sql::workflow
