#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nl2sql/common/clock.hpp"
#include "nl2sql/workflow/types.hpp"

namespace nl2sql::workflow {

/// Results of a task's direct dependencies, keyed by task id.
using DependencyResults = std::map<std::string, const TaskResult*>;

/// Runs one task. A returned result with `error` set (or a thrown exception)
/// marks the task failed.
using TaskRunner = std::function<TaskResult(const TaskNode& task, const DependencyResults& deps)>;

/// Called whenever nothing is running and nothing is ready. Returned tasks are
/// appended to the graph (they may depend on any existing task); returning
/// none ends the run.
using ReplanHook =
    std::function<std::vector<TaskNode>(const std::vector<TaskNode>& tasks, const std::map<std::string, TaskResult>& results)>;

struct SchedulerOptions {
  std::size_t parallelism = 1;  // 1 runs every task on the calling thread
  const Clock* clock = nullptr;  // SteadyClock when null
  ReplanHook replan;
  std::size_t max_tasks = 10;  // cap applied to replanned growth
};

struct ScheduleResult {
  std::vector<TaskNode> tasks;  // final states
  std::map<std::string, TaskResult> results;
};

/// Dependency-ordered execution of an acyclic task graph. Tasks whose
/// dependencies are all done start in plan order, at most `parallelism` at a
/// time. A failed task marks its transitive dependents failed (skipped) and
/// the rest of the graph keeps running. Events go to `trace`, which only the
/// calling thread writes.
ScheduleResult run_dag(std::vector<TaskNode> tasks, const TaskRunner& runner, const SchedulerOptions& options,
                       Trace& trace);

}  // namespace nl2sql::workflow
