#include "nl2sql/workflow/types.hpp"

#include "nl2sql/common/jsonl.hpp"

namespace nl2sql::workflow {

std::string_view to_string(TaskKind kind) noexcept { return kind == TaskKind::sql ? "sql" : "reasoning"; }

std::string_view to_string(TaskState state) noexcept {
  switch (state) {
    case TaskState::pending: return "pending";
    case TaskState::ready: return "ready";
    case TaskState::running: return "running";
    case TaskState::done: return "done";
    case TaskState::failed: return "failed";
  }
  return "pending";
}

Trace::Trace(const Trace& other) : events_(other.events()) {}

Trace& Trace::operator=(const Trace& other) {
  if (this != &other) {
    auto copy = other.events();
    std::lock_guard lock(mu_);
    events_ = std::move(copy);
  }
  return *this;
}

void Trace::append(std::string event, std::string task_id, std::string detail) {
  std::lock_guard lock(mu_);
  events_.push_back({events_.size(), std::move(event), std::move(task_id), std::move(detail)});
}

std::vector<TraceEvent> Trace::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::string Trace::to_jsonl() const {
  std::string out;
  for (const auto& e : events()) {
    nlohmann::json line = {{"ts", e.ts}, {"event", e.event}, {"task_id", e.task_id}};
    if (!e.detail.empty()) line["detail"] = e.detail;
    out += jsonl::dump(line);
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const TaskNode& task) {
  return {{"task_id", task.task_id},
          {"instruction", task.instruction},
          {"depends_on", task.depends_on},
          {"kind", to_string(task.kind)},
          {"state", to_string(task.state)}};
}

nlohmann::json to_json(const WorkflowPlan& plan) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : plan.tasks) tasks.push_back(to_json(t));
  return {{"query", plan.query},         {"tasks", std::move(tasks)},   {"max_tasks", plan.max_tasks},
          {"fallback", plan.fallback},   {"warnings", plan.warnings},   {"context", retrieval::to_json(plan.context)}};
}

nlohmann::json to_json(const TaskResult& result) {
  nlohmann::json j = {{"task_id", result.task_id}, {"skipped", result.skipped}, {"elapsed_ms", result.elapsed_ms}};
  j["sql"] = result.sql ? nlohmann::json(*result.sql) : nlohmann::json(nullptr);
  j["result"] = result.result ? sqlexec::to_json(*result.result) : nlohmann::json(nullptr);
  j["error"] = result.error ? nlohmann::json(*result.error) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const WorkflowOutcome& outcome) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : outcome.tasks) tasks.push_back(to_json(t));
  nlohmann::json results = nlohmann::json::array();
  for (const auto& t : outcome.tasks) {
    auto it = outcome.task_results.find(t.task_id);
    if (it != outcome.task_results.end()) results.push_back(to_json(it->second));
  }
  return {{"query", outcome.query},
          {"answer", outcome.answer},
          {"tasks", std::move(tasks)},
          {"task_results", std::move(results)},
          {"summary_fallback", outcome.summary_fallback},
          {"warnings", outcome.warnings}};
}

}  // namespace nl2sql::workflow
