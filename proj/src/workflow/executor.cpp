#include "nl2sql/workflow/executor.hpp"

#include <algorithm>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/workflow/planner.hpp"

namespace nl2sql::workflow {
using namespace nl2sql::text;
namespace {

const llm::TemplateRegistry& registry(const ExecuteOptions& options) {
  return options.templates ? *options.templates : llm::TemplateRegistry::builtin();
}

bool is_text_answer(const sqlexec::ResultTable& table) {
  return table.columns.size() == 1 && table.columns[0] == "answer" && table.rows.size() == 1 &&
         std::holds_alternative<std::string>(table.rows[0][0]);
}

std::string render_result(const TaskResult& r, std::size_t max_rows) {
  if (!r.ok()) return "(failed: " + single_line(r.error.value_or("unknown error")) + ")\n";
  if (is_text_answer(*r.result)) return std::get<std::string>(r.result->rows[0][0]) + "\n";
  return sqlexec::render_table(*r.result, max_rows);
}

std::string concat_summary(const std::vector<TaskNode>& tasks, const std::map<std::string, TaskResult>& results,
                           std::size_t max_rows) {
  std::string out;
  for (const auto& t : tasks) {
    auto it = results.find(t.task_id);
    if (it == results.end()) continue;
    if (!out.empty()) out += '\n';
    out += "## " + t.task_id + ": " + single_line(t.instruction) + "\n";
    out += render_result(it->second, max_rows);
  }
  return out;
}

std::string failure_note(const std::vector<TaskNode>& tasks, const std::map<std::string, TaskResult>& results) {
  std::vector<std::string> failed;
  for (const auto& t : tasks) {
    auto it = results.find(t.task_id);
    if (it == results.end() || it->second.ok()) continue;
    failed.push_back(t.task_id + " (" + single_line(it->second.error.value_or("failed")) + ")");
  }
  if (failed.empty()) return {};
  return "Note: partial failure, " + std::to_string(failed.size()) + " of " + std::to_string(tasks.size()) +
         " tasks failed: " + join(failed, "; ");
}

}  // namespace

SummaryMode parse_summary_mode(std::string_view name) {
  const auto n = to_lower(trim(name));
  if (n == "llm") return SummaryMode::llm;
  if (n == "concat") return SummaryMode::concat;
  throw ConfigError("unknown summary mode '" + std::string(name) + "' (expected llm or concat)");
}

std::string_view to_string(SummaryMode mode) noexcept { return mode == SummaryMode::llm ? "llm" : "concat"; }

std::string extract_sql(std::string_view reply) {
  const auto open = reply.find("```");
  if (open != std::string_view::npos) {
    auto start = reply.find('\n', open);
    if (start != std::string_view::npos) {
      ++start;
      const auto close = reply.find("```", start);
      return std::string(trim(reply.substr(start, close == std::string_view::npos ? close : close - start)));
    }
  }
  return std::string(trim(reply));
}

std::string render_dependencies(const TaskNode& task, const DependencyResults& deps, std::size_t max_rows) {
  if (task.depends_on.empty()) return "(none)";
  std::string out;
  for (const auto& id : task.depends_on) {
    auto it = deps.find(id);
    if (it == deps.end() || it->second == nullptr) continue;
    out += "[" + id + "]\n";
    out += render_result(*it->second, max_rows);
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

WorkflowOutcome execute(const WorkflowPlan& plan, const llm::ModelRef& sql_model, llm::Provider& provider,
                        const sqlexec::ConnectionSpec& db, const ExecuteOptions& options) {
  validate_tasks(plan.tasks, std::max(plan.max_tasks, plan.tasks.size()));
  const auto& templates = registry(options);

  WorkflowOutcome out;
  out.query = plan.query;
  out.warnings = plan.warnings;
  if (plan.fallback) out.trace.append("plan_fallback", "", plan.warnings.empty() ? "" : plan.warnings.back());

  std::optional<std::string> db_failure;
  try {
    sqlexec::probe(db, options.exec.mode);
  } catch (const DbConnectionError& e) {
    db_failure = e.what();
  }

  if (db_failure) {
    out.tasks = plan.tasks;
    for (auto& t : out.tasks) {
      t.state = TaskState::failed;
      TaskResult r;
      r.task_id = t.task_id;
      r.error = "database unreachable: " + *db_failure;
      out.trace.append("failed", t.task_id, *r.error);
      out.task_results.emplace(t.task_id, std::move(r));
    }
    out.answer = "No task could run: database unreachable: " + *db_failure;
    out.warnings.push_back(out.answer);
    return out;
  }

  const auto& reasoning_model = options.reasoning_model ? *options.reasoning_model : sql_model;
  TaskRunner runner = [&](const TaskNode& task, const DependencyResults& deps) {
    llm::Vars vars = {{"query", plan.query},
                      {"context", plan.context.rendered},
                      {"dependencies", render_dependencies(task, deps, options.dependency_rows)},
                      {"instruction", task.instruction}};
    TaskResult r;
    if (task.kind == TaskKind::reasoning) {
      const auto reply =
          llm::complete_with_retry(provider, reasoning_model, templates.render("task.reasoning.v1", vars), options.retry);
      sqlexec::ResultTable table;
      table.columns = {"answer"};
      table.rows.push_back({std::string(trim(reply.text))});
      table.row_limit = 1;
      r.result = std::move(table);
      return r;
    }
    const auto reply =
        llm::complete_with_retry(provider, sql_model, templates.render("task.sql.v1", vars), options.retry);
    r.sql = extract_sql(reply.text);
    try {
      r.result = sqlexec::execute_sql(*r.sql, db, options.exec);
    } catch (const Error& e) {
      r.error = std::string(e.kind()) + ": " + e.what();
    }
    return r;
  };

  SchedulerOptions sched;
  sched.parallelism = options.parallelism;
  sched.clock = options.clock;
  sched.replan = options.replan;
  sched.max_tasks = plan.max_tasks;
  auto scheduled = run_dag(plan.tasks, runner, sched, out.trace);
  out.tasks = std::move(scheduled.tasks);
  out.task_results = std::move(scheduled.results);

  const bool any_done = std::any_of(out.tasks.begin(), out.tasks.end(),
                                    [](const TaskNode& t) { return t.state == TaskState::done; });
  if (!any_done) {
    out.answer = concat_summary(out.tasks, out.task_results, options.dependency_rows);
  } else {
    const auto& summary_model = options.summary_model ? *options.summary_model : sql_model;
    auto summary = summarize(plan.query, out.tasks, out.task_results, options.summary_mode, &summary_model,
                             &provider, options);
    out.answer = std::move(summary.answer);
    out.summary_fallback = summary.fell_back;
    if (!summary.warning.empty()) out.warnings.push_back(summary.warning);
  }
  if (auto note = failure_note(out.tasks, out.task_results); !note.empty()) {
    while (!out.answer.empty() && out.answer.back() == '\n') out.answer.pop_back();
    out.answer += "\n\n" + note;
  }
  return out;
}

SummaryResult summarize(const std::string& query, const std::vector<TaskNode>& tasks,
                        const std::map<std::string, TaskResult>& results, SummaryMode mode,
                        const llm::ModelRef* model, llm::Provider* provider, const ExecuteOptions& options) {
  const bool any_finished = std::any_of(tasks.begin(), tasks.end(), [&](const TaskNode& t) {
    auto it = results.find(t.task_id);
    return it != results.end() && it->second.ok();
  });
  if (!any_finished) throw WorkflowError("nothing to summarize: no task finished");

  SummaryResult out;
  const auto concat = concat_summary(tasks, results, options.dependency_rows);
  if (mode == SummaryMode::concat) {
    out.answer = concat;
    return out;
  }
  if (model == nullptr || provider == nullptr) throw ConfigError("llm summary needs a model and provider");
  try {
    const auto prompt = registry(options).render("summary.v1", {{"query", query}, {"results", concat}});
    out.answer = std::string(trim(llm::complete_with_retry(*provider, *model, prompt, options.retry).text));
  } catch (const TransportError& e) {
    out.answer = concat;
    out.fell_back = true;
    out.warning = std::string("summary model failed (") + single_line(e.what()) + "); answer is the raw results";
  } catch (const CassetteMissError& e) {
    out.answer = concat;
    out.fell_back = true;
    out.warning = std::string("summary model failed (") + single_line(e.what()) + "); answer is the raw results";
  }
  return out;
}

std::string generate_sql(const std::string& query, const retrieval::RetrievalContext& context,
                         const llm::ModelRef& model, llm::Provider& provider, const llm::RetryPolicy& retry,
                         const llm::TemplateRegistry* templates) {
  const auto& reg = templates ? *templates : llm::TemplateRegistry::builtin();
  const auto schema = context.rendered.empty() ? std::string("(none)") : context.rendered;
  const auto prompt = reg.render("sqlllm.schema.v1", {{"query", query}, {"schema", schema}});
  return extract_sql(llm::complete_with_retry(provider, model, prompt, retry).text);
}

}  // namespace nl2sql::workflow
