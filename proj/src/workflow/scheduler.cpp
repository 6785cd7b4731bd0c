#include "nl2sql/workflow/scheduler.hpp"

#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "nl2sql/common/error.hpp"
#include "nl2sql/workflow/planner.hpp"

namespace nl2sql::workflow {
namespace {

struct Finished {
  std::size_t index;
  TaskResult result;
};

class Run {
 public:
  Run(std::vector<TaskNode> tasks, const TaskRunner& runner, const SchedulerOptions& options, Trace& trace)
      : tasks_(std::move(tasks)), runner_(runner), options_(options), trace_(trace) {
    clock_ = options.clock ? options.clock : &steady_;
    parallelism_ = std::max<std::size_t>(options.parallelism, 1);
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
      tasks_[i].state = TaskState::pending;
      index_.emplace(tasks_[i].task_id, i);
    }
    wire(0);
  }

  ScheduleResult run() {
    while (true) {
      while (running_ < parallelism_ && !ready_.empty()) launch(pop_ready());
      if (running_ == 0) {
        if (options_.replan && try_replan()) continue;
        break;
      }
      complete(wait_finished());
    }
    workers_.clear();  // joins
    return {std::move(tasks_), std::move(results_)};
  }

 private:
  // Computes pending dependency counts for tasks[first..] and queues the ones
  // that can start. Tasks behind an already failed dependency are skipped.
  void wire(std::size_t first) {
    remaining_.resize(tasks_.size(), 0);
    dependents_.resize(tasks_.size());
    for (std::size_t i = first; i < tasks_.size(); ++i) {
      for (const auto& dep : tasks_[i].depends_on) {
        const auto d = index_.at(dep);
        dependents_[d].push_back(i);
        if (tasks_[d].state != TaskState::done) ++remaining_[i];
      }
    }
    for (std::size_t i = first; i < tasks_.size(); ++i) {
      if (tasks_[i].state != TaskState::pending) continue;
      for (const auto& dep : tasks_[i].depends_on) {
        const auto d = index_.at(dep);
        if (tasks_[d].state == TaskState::failed) {
          skip_dependents_of(d);
          break;
        }
      }
    }
    for (std::size_t i = first; i < tasks_.size(); ++i)
      if (tasks_[i].state == TaskState::pending && remaining_[i] == 0) mark_ready(i);
  }

  void mark_ready(std::size_t i) {
    tasks_[i].state = TaskState::ready;
    ready_.insert(i);
    trace_.append("ready", tasks_[i].task_id);
  }

  std::size_t pop_ready() {
    const auto i = *ready_.begin();
    ready_.erase(ready_.begin());
    return i;
  }

  void launch(std::size_t i) {
    tasks_[i].state = TaskState::running;
    trace_.append("start", tasks_[i].task_id);
    ++running_;
    DependencyResults deps;
    for (const auto& dep : tasks_[i].depends_on) deps.emplace(dep, &results_.at(dep));
    if (parallelism_ == 1) {
      finished_.push_back({i, invoke(tasks_[i], deps)});
      return;
    }
    // The task node and dependency results are copied or stay untouched while
    // the worker runs: results_ only gains entries for other tasks.
    workers_.emplace_back([this, i, task = tasks_[i], deps = std::move(deps)] {
      auto result = invoke(task, deps);
      {
        std::lock_guard lock(mu_);
        finished_.push_back({i, std::move(result)});
      }
      cv_.notify_one();
    });
  }

  TaskResult invoke(const TaskNode& task, const DependencyResults& deps) const {
    const auto started = clock_->now_ms();
    TaskResult result;
    try {
      result = runner_(task, deps);
    } catch (const std::exception& e) {
      result = {};
      result.error = e.what();
    } catch (...) {
      result = {};
      result.error = "unknown error";
    }
    result.task_id = task.task_id;
    if (!result.error && !result.result) result.error = "task produced no result";
    if (result.error) result.result.reset();
    result.elapsed_ms = clock_->now_ms() - started;
    return result;
  }

  Finished wait_finished() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !finished_.empty(); });
    auto f = std::move(finished_.front());
    finished_.pop_front();
    return f;
  }

  void complete(Finished f) {
    --running_;
    const auto i = f.index;
    const bool ok = f.result.ok();
    const auto error = f.result.error.value_or("");
    results_.insert_or_assign(tasks_[i].task_id, std::move(f.result));
    if (ok) {
      tasks_[i].state = TaskState::done;
      trace_.append("done", tasks_[i].task_id);
      for (auto d : dependents_[i])
        if (--remaining_[d] == 0 && tasks_[d].state == TaskState::pending) mark_ready(d);
    } else {
      tasks_[i].state = TaskState::failed;
      trace_.append("failed", tasks_[i].task_id, error);
      skip_dependents_of(i);
    }
  }

  void skip_dependents_of(std::size_t failed) {
    std::set<std::size_t> closure;
    std::deque<std::size_t> queue{failed};
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (auto d : dependents_[i])
        if (closure.insert(d).second) queue.push_back(d);
    }
    for (auto d : closure) {  // plan order
      if (tasks_[d].state != TaskState::pending) continue;
      tasks_[d].state = TaskState::failed;
      TaskResult r;
      r.task_id = tasks_[d].task_id;
      r.skipped = true;
      r.error = "skipped: dependency '" + tasks_[failed].task_id + "' failed";
      results_.insert_or_assign(r.task_id, std::move(r));
      trace_.append("skipped", tasks_[d].task_id, "dependency '" + tasks_[failed].task_id + "' failed");
    }
  }

  bool try_replan() {
    std::vector<TaskNode> extra;
    try {
      extra = options_.replan(tasks_, results_);
    } catch (const std::exception& e) {
      trace_.append("replan_rejected", "", e.what());
      return false;
    }
    if (extra.empty()) return false;
    auto combined = tasks_;
    combined.insert(combined.end(), extra.begin(), extra.end());
    try {
      validate_tasks(combined, std::max(options_.max_tasks, tasks_.size()));
    } catch (const PlanValidationError& e) {
      trace_.append("replan_rejected", "", e.what());
      return false;
    }
    const auto first = tasks_.size();
    for (auto& t : extra) {
      t.state = TaskState::pending;
      index_.emplace(t.task_id, tasks_.size());
      trace_.append("replan", t.task_id);
      tasks_.push_back(std::move(t));
    }
    wire(first);
    return true;
  }

  std::vector<TaskNode> tasks_;
  const TaskRunner& runner_;
  const SchedulerOptions& options_;
  Trace& trace_;
  SteadyClock steady_;
  const Clock* clock_;
  std::size_t parallelism_;

  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> remaining_;
  std::vector<std::vector<std::size_t>> dependents_;
  std::set<std::size_t> ready_;
  std::size_t running_ = 0;
  std::map<std::string, TaskResult> results_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Finished> finished_;
  std::vector<std::jthread> workers_;
};

}  // namespace

ScheduleResult run_dag(std::vector<TaskNode> tasks, const TaskRunner& runner, const SchedulerOptions& options,
                       Trace& trace) {
  if (tasks.empty()) return {};
  validate_tasks(tasks, std::max(options.max_tasks, tasks.size()));
  return Run(std::move(tasks), runner, options, trace).run();
}

}  // namespace nl2sql::workflow
