#include "nl2sql/workflow/planner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"

namespace nl2sql::workflow {
using namespace nl2sql::text;
namespace {

std::string_view fenced_body(std::string_view reply) {
  const auto open = reply.find("```");
  if (open == std::string_view::npos) return reply;
  auto body_start = reply.find('\n', open);
  if (body_start == std::string_view::npos) return reply;
  ++body_start;
  const auto close = reply.find("```", body_start);
  if (close == std::string_view::npos) return reply.substr(body_start);
  return reply.substr(body_start, close - body_start);
}

std::string id_from_json(const nlohmann::json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw PlanValidationError(std::string(what) + " must be a string");
}

TaskNode task_from_json(const nlohmann::json& item, std::size_t position) {
  const auto where = "task #" + std::to_string(position + 1);
  if (!item.is_object()) throw PlanValidationError(where + " is not an object");
  TaskNode t;
  if (!item.contains("task_id")) throw PlanValidationError(where + " has no task_id");
  t.task_id = std::string(trim(id_from_json(item["task_id"], "task_id")));
  if (!item.contains("instruction") || !item["instruction"].is_string())
    throw PlanValidationError(where + " has no instruction");
  t.instruction = std::string(trim(item["instruction"].get<std::string>()));
  if (item.contains("depends_on") && !item["depends_on"].is_null()) {
    const auto& deps = item["depends_on"];
    if (!deps.is_array()) throw PlanValidationError(where + ": depends_on must be an array");
    for (const auto& d : deps) {
      auto id = std::string(trim(id_from_json(d, "depends_on entry")));
      if (std::find(t.depends_on.begin(), t.depends_on.end(), id) == t.depends_on.end())
        t.depends_on.push_back(std::move(id));
    }
  }
  if (item.contains("kind") && !item["kind"].is_null()) {
    if (!item["kind"].is_string()) throw PlanValidationError(where + ": kind must be a string");
    const auto kind = to_lower(item["kind"].get<std::string>());
    if (kind == "sql") {
      t.kind = TaskKind::sql;
    } else if (kind == "reasoning") {
      t.kind = TaskKind::reasoning;
    } else {
      throw PlanValidationError(where + ": unknown kind '" + kind + "'");
    }
  }
  return t;
}

}  // namespace

std::optional<std::vector<std::string>> find_cycle(const std::vector<TaskNode>& tasks) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < tasks.size(); ++i) index.emplace(tasks[i].task_id, i);
  std::vector<std::size_t> indegree(tasks.size(), 0);
  std::vector<std::vector<std::size_t>> dependents(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (const auto& dep : tasks[i].depends_on) {
      auto it = index.find(dep);
      if (it == index.end()) continue;
      ++indegree[i];
      dependents[it->second].push_back(i);
    }
  }
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (indegree[i] == 0) queue.push_back(i);
  std::size_t visited = 0;
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    ++visited;
    for (auto d : dependents[i])
      if (--indegree[d] == 0) queue.push_back(d);
  }
  if (visited == tasks.size()) return std::nullopt;
  std::vector<std::string> stuck;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (indegree[i] > 0) stuck.push_back(tasks[i].task_id);
  return stuck;
}

void validate_tasks(const std::vector<TaskNode>& tasks, std::size_t max_tasks) {
  if (tasks.empty()) throw PlanValidationError("plan has no tasks");
  if (tasks.size() > max_tasks)
    throw PlanValidationError("plan has " + std::to_string(tasks.size()) + " tasks, more than the limit of " +
                              std::to_string(max_tasks));
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (t.task_id.empty()) throw PlanValidationError("task with an empty task_id");
    if (!ids.insert(t.task_id).second) throw PlanValidationError("duplicate task_id '" + t.task_id + "'");
    if (t.instruction.empty()) throw PlanValidationError("task '" + t.task_id + "' has an empty instruction");
  }
  for (const auto& t : tasks) {
    for (const auto& dep : t.depends_on) {
      if (dep == t.task_id) throw PlanValidationError("task '" + t.task_id + "' depends on itself");
      if (!ids.count(dep))
        throw PlanValidationError("task '" + t.task_id + "' depends on unknown task '" + dep + "'");
    }
  }
  if (auto stuck = find_cycle(tasks)) throw PlanValidationError("dependency cycle among: " + join(*stuck, ", "));
}

std::vector<TaskNode> parse_plan_text(std::string_view reply, std::size_t max_tasks) {
  const auto body = trim(fenced_body(reply));
  if (body.empty()) throw PlanValidationError("empty plan");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw PlanValidationError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("tasks")) doc = doc["tasks"];
  if (!doc.is_array()) throw PlanValidationError("plan must be a JSON array of tasks");
  std::vector<TaskNode> tasks;
  for (std::size_t i = 0; i < doc.size(); ++i) tasks.push_back(task_from_json(doc[i], i));
  validate_tasks(tasks, max_tasks);
  return tasks;
}

std::vector<TaskNode> fallback_tasks(const std::string& query) {
  TaskNode t;
  t.task_id = "t1";
  t.instruction = query;
  return {t};
}

WorkflowPlan plan(const std::string& query, const retrieval::RetrievalContext& context, const llm::ModelRef& model,
                  llm::Provider& provider, const PlanOptions& options) {
  if (trim(query).empty()) throw ConfigError("query is empty");
  const auto& templates = options.templates ? *options.templates : llm::TemplateRegistry::builtin();

  WorkflowPlan out;
  out.query = query;
  out.context = context;
  out.max_tasks = options.max_tasks;

  auto ask = [&](const std::string& prompt) {
    try {
      return llm::complete_with_retry(provider, model, prompt, options.retry).text;
    } catch (const TransportError& e) {
      throw WorkflowError(std::string("planner request failed: ") + e.what());
    } catch (const CassetteMissError& e) {
      throw WorkflowError(std::string("planner request failed: ") + e.what());
    }
  };

  const auto max_tasks = std::to_string(options.max_tasks);
  const auto first = ask(templates.render(
      options.template_id, {{"query", query}, {"context", context.rendered}, {"max_tasks", max_tasks}}));
  std::string first_error;
  try {
    out.tasks = parse_plan_text(first, options.max_tasks);
    return out;
  } catch (const PlanValidationError& e) {
    first_error = e.what();
  }

  const auto second = ask(templates.render(
      options.repair_template_id,
      {{"query", query}, {"error", first_error}, {"previous", first}, {"max_tasks", max_tasks}}));
  try {
    out.tasks = parse_plan_text(second, options.max_tasks);
    out.warnings.push_back("planner output repaired after: " + first_error);
    return out;
  } catch (const PlanValidationError& e) {
    out.tasks = fallback_tasks(query);
    out.fallback = true;
    out.warnings.push_back("planner output unusable (" + single_line(e.what()) +
                           "); using a single-task fallback plan");
  }
  return out;
}

}  // namespace nl2sql::workflow
