#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nl2sql/retrieval/types.hpp"
#include "nl2sql/sqlexec/result_table.hpp"

namespace nl2sql::workflow {

enum class TaskKind { sql, reasoning };
enum class TaskState { pending, ready, running, done, failed };

std::string_view to_string(TaskKind kind) noexcept;
std::string_view to_string(TaskState state) noexcept;

struct TaskNode {
  std::string task_id;
  std::string instruction;
  std::vector<std::string> depends_on;  // distinct ids, declaration order
  TaskKind kind = TaskKind::sql;
  TaskState state = TaskState::pending;
};

struct WorkflowPlan {
  std::string query;
  retrieval::RetrievalContext context;
  std::vector<TaskNode> tasks;
  std::size_t max_tasks = 10;
  bool fallback = false;
  std::vector<std::string> warnings;
};

struct TaskResult {
  std::string task_id;
  std::optional<std::string> sql;
  std::optional<sqlexec::ResultTable> result;
  std::optional<std::string> error;
  bool skipped = false;  // never started because a dependency failed
  std::int64_t elapsed_ms = 0;

  bool ok() const noexcept { return result.has_value() && !error.has_value(); }
  bool operator==(const TaskResult&) const = default;
};

struct TraceEvent {
  std::uint64_t ts = 0;  // position in the log
  std::string event;     // ready, start, done, failed, skipped, plan_fallback, replan, ...
  std::string task_id;
  std::string detail;
};

/// Append-only, totally ordered event log.
class Trace {
 public:
  Trace() = default;
  Trace(const Trace& other);
  Trace& operator=(const Trace& other);

  void append(std::string event, std::string task_id, std::string detail = {});
  std::vector<TraceEvent> events() const;
  /// One {ts, event, task_id[, detail]} object per line.
  std::string to_jsonl() const;

 private:
  mutable std::mutex mu_;
  std::vector<TraceEvent> events_;
};

struct WorkflowOutcome {
  std::string query;
  std::string answer;
  std::vector<TaskNode> tasks;  // final states, plan order
  std::map<std::string, TaskResult> task_results;
  Trace trace;
  bool summary_fallback = false;
  std::vector<std::string> warnings;
};

nlohmann::json to_json(const TaskNode& task);
nlohmann::json to_json(const WorkflowPlan& plan);
nlohmann::json to_json(const TaskResult& result);
/// The trace is exported separately (Trace::to_jsonl).
nlohmann::json to_json(const WorkflowOutcome& outcome);

}  // namespace nl2sql::workflow
