#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nl2sql/llm/provider.hpp"
#include "nl2sql/llm/templates.hpp"
#include "nl2sql/workflow/types.hpp"

namespace nl2sql::workflow {

/// Ids of tasks that sit on or behind a dependency cycle (Kahn's algorithm
/// leftovers), or nullopt for an acyclic graph. Unknown dependency ids are
/// ignored here.
std::optional<std::vector<std::string>> find_cycle(const std::vector<TaskNode>& tasks);

/// Throws PlanValidationError for: no tasks, more than max_tasks, duplicate
/// or empty ids, empty instructions, unknown or self dependencies, cycles.
void validate_tasks(const std::vector<TaskNode>& tasks, std::size_t max_tasks);

/// Parses generator output: the first fenced block (```json or ```) if any,
/// otherwise the whole reply, must hold a JSON array of
/// {task_id, instruction, depends_on?, kind?}. Validates the result.
std::vector<TaskNode> parse_plan_text(std::string_view reply, std::size_t max_tasks);

/// The whole question as one sql task.
std::vector<TaskNode> fallback_tasks(const std::string& query);

struct PlanOptions {
  std::size_t max_tasks = 10;
  llm::RetryPolicy retry;
  const llm::TemplateRegistry* templates = nullptr;  // builtin when null
  std::string template_id = "planner.v1";
  std::string repair_template_id = "planner.repair.v1";
};

/// Asks the generator for a plan, retries once with a repair prompt when the
/// reply is unusable, then falls back to fallback_tasks() with a warning.
/// Provider failures (after retries) raise WorkflowError.
WorkflowPlan plan(const std::string& query, const retrieval::RetrievalContext& context, const llm::ModelRef& model,
                  llm::Provider& provider, const PlanOptions& options = {});

}  // namespace nl2sql::workflow
