// Acceptance checks. Each check prints exactly one line:
//   PASS <name>: <detail>   or   FAIL <name>: <detail>
// and the process exits non-zero when any check fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include <json.hpp>

#include "nl2sql/common/clock.hpp"
#include "nl2sql/common/error.hpp"
#include "nl2sql/common/hash.hpp"
#include "nl2sql/common/text.hpp"
#include "nl2sql/corpus/corpus.hpp"
#include "nl2sql/judge/judge.hpp"
#include "nl2sql/llm/scripted.hpp"
#include "nl2sql/retrieval/index.hpp"
#include "nl2sql/workflow/executor.hpp"
#include "nl2sql/workflow/planner.hpp"
#include "nl2sql/workflow/scheduler.hpp"
#include "test_support.hpp"

using namespace nl2sql;
namespace fs = std::filesystem;
using WallClock = std::chrono::steady_clock;

namespace {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

double seconds_since(WallClock::time_point start) {
  return std::chrono::duration<double>(WallClock::now() - start).count();
}

std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

int run_cli(const std::vector<std::string>& args) {
  std::string cmd = std::string("'") + NL2SQL_CLI_PATH + "'";
  for (const auto& a : args) cmd += " '" + a + "'";
  cmd += " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

CheckResult demo_determinism() {
  testing::TempDir dir;
  const std::vector<std::string> artifacts = {"outcome.json", "trace.jsonl", "report.json", "report.txt", "plan.json",
                                              "context.json"};
  double slowest = 0;
  for (const char* run : {"a", "b"}) {
    const auto start = WallClock::now();
    const int code = run_cli({"demo", "--out", (dir / run).string()});
    slowest = std::max(slowest, seconds_since(start));
    if (code != 0) return {false, std::string("demo run ") + run + " exited with " + std::to_string(code)};
  }
  for (const auto& name : artifacts) {
    const auto a = testing::read_text(dir / "a" / name);
    const auto b = testing::read_text(dir / "b" / name);
    if (a.empty()) return {false, name + " is empty"};
    if (a != b) return {false, name + " differs between runs"};
  }
  if (slowest >= 10.0) return {false, "slowest run took " + fixed(slowest) + " s (limit 10 s)"};
  return {true, "outcome, trace and report byte-identical across 2 runs; slowest " + fixed(slowest) + " s"};
}

CheckResult exe_oracle_suite() {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  const auto tables = testing::oracle_run(db, "SELECT COUNT(*) FROM sqlite_master WHERE type = 'table'");
  const auto table_count = static_cast<long long>(tables.rows[0][0].number_value);
  const auto& pairs = testing::exe_pairs();
  bool has_sales_pair = false;
  std::size_t agree = 0;
  std::string first_disagreement;
  for (const auto& pair : pairs) {
    has_sales_pair |= pair.gen.find("sales >= 100") != std::string::npos && pair.gold.find("sales > 99") != std::string::npos;
    const bool oracle = testing::oracle_equivalent(db, pair.gen, pair.gold, pair.ordered);
    judge::EvalItem item;
    item.id = "pair";
    item.sql_gen = pair.gen;
    item.sql_gold = pair.gold;
    const auto v = judge::exe_score(item, testing::sqlite_spec(db));
    if (v.passed() == oracle && oracle == pair.equivalent) {
      ++agree;
    } else if (first_disagreement.empty()) {
      first_disagreement = pair.gen;
    }
  }
  const auto summary = std::to_string(agree) + "/" + std::to_string(pairs.size()) + " agree on " +
                       std::to_string(table_count) + " tables";
  if (table_count < 5) return {false, summary + " (need >= 5 tables)"};
  if (pairs.size() < 30) return {false, summary + " (need >= 30 pairs)"};
  if (!has_sales_pair) return {false, "sales >= 100 vs > 99 pair missing"};
  if (agree != pairs.size()) return {false, summary + "; first disagreement: " + first_disagreement};
  return {true, summary + ", including sales >= 100 vs > 99"};
}

CheckResult exe_rewrite_invariance() {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  const auto& queries = testing::shop_queries();
  std::mt19937_64 rng(20240630);
  std::size_t baseline_passes = 0, flips = 0;
  std::string example;
  for (int i = 0; i < 100; ++i) {
    const auto& gold = queries[rng() % queries.size()];
    judge::EvalItem item;
    item.id = "q" + std::to_string(i);
    item.sql_gold = gold;
    item.sql_gen = gold;
    if (!judge::exe_score(item, testing::sqlite_spec(db)).passed()) continue;
    ++baseline_passes;
    item.sql_gen = testing::rewrite_sql(gold, rng);
    if (!judge::exe_score(item, testing::sqlite_spec(db)).passed()) {
      ++flips;
      if (example.empty()) example = *item.sql_gen;
    }
  }
  const auto summary = std::to_string(flips) + " flips over " + std::to_string(baseline_passes) + " passing queries";
  if (baseline_passes != 100) return {false, summary + " (every fixture query should pass against itself)"};
  if (flips != 0) return {false, summary + "; e.g. " + text::single_line(example)};
  return {true, summary};
}

workflow::TaskResult table_result(std::int64_t v) {
  workflow::TaskResult r;
  sqlexec::ResultTable t;
  t.columns = {"v"};
  t.rows = {{v}};
  r.result = t;
  return r;
}

CheckResult scheduler_soundness() {
  const auto start = WallClock::now();
  auto work = std::async(std::launch::async, []() -> std::string {
    std::mt19937_64 rng(424242);
    for (int g = 0; g < 1000; ++g) {
      const auto tasks = testing::random_dag(rng, 10);
      std::map<std::string, int> latency_us;
      std::set<std::string> failing;
      for (const auto& t : tasks) {
        latency_us[t.task_id] = static_cast<int>(rng() % 1500);
        if (rng() % 8 == 0) failing.insert(t.task_id);
      }
      for (std::size_t p : {1u, 2u, 4u}) {
        workflow::Trace trace;
        workflow::SchedulerOptions options;
        options.parallelism = p;
        auto result = workflow::run_dag(
            tasks,
            [&](const workflow::TaskNode& t, const workflow::DependencyResults&) -> workflow::TaskResult {
              std::this_thread::sleep_for(std::chrono::microseconds(latency_us.at(t.task_id)));
              if (failing.count(t.task_id)) throw std::runtime_error("injected failure");
              return table_result(1);
            },
            options, trace);
        const auto problem = testing::check_schedule(tasks, result.tasks, trace.events(), p);
        if (!problem.empty()) return "graph " + std::to_string(g) + ", parallelism " + std::to_string(p) + ": " + problem;
      }
    }
    return {};
  });
  if (work.wait_for(std::chrono::seconds(60)) != std::future_status::ready) {
    std::cout << "FAIL scheduler_soundness: did not finish within 60 s (deadlock or stall)" << std::endl;
    std::_Exit(1);
  }
  const auto problem = work.get();
  const double elapsed = seconds_since(start);
  if (!problem.empty()) return {false, problem};
  return {true, "1000 graphs x parallelism {1,2,4}: ordering, terminality and width hold; " + fixed(elapsed) + " s"};
}

CheckResult scheduler_equivalence() {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  const auto& queries = testing::shop_queries();

  // Pure scripted provider: the SQL for "step i" is a fixture query chosen by
  // i, some steps produce broken SQL, and reasoning replies fingerprint the
  // dependency block they were shown.
  llm::ScriptedProvider provider;
  provider.add_rule(R"(\[reasoning\])", [](std::string_view prompt) {
    return "digest " + sha256_hex(prompt).substr(0, 12);
  });
  provider.add_rule(R"(Sub-task: step (\d+))", [&](std::string_view prompt) {
    const auto at = prompt.find("Sub-task: step ");
    const int step = std::stoi(std::string(prompt.substr(at + 15)));
    // Latency varies by prompt so completion order differs across widths.
    std::this_thread::sleep_for(std::chrono::microseconds(fnv1a64(prompt) % 800));
    if (step % 7 == 6) return std::string("SELECT missing_column FROM products");
    return "```sql\n" + queries[static_cast<std::size_t>(step) % queries.size()] + "\n```";
  });
  provider.add_rule(R"(\[summary\])", "summary");

  std::mt19937_64 rng(777);
  FrozenClock clock;
  std::size_t graphs = 0, tasks_total = 0;
  for (int g = 0; g < 1000; ++g) {
    workflow::WorkflowPlan plan;
    plan.query = "equivalence check";
    plan.tasks = testing::random_dag(rng, 10);
    for (auto& t : plan.tasks) {
      if (!t.depends_on.empty() && rng() % 3 == 0) t.kind = workflow::TaskKind::reasoning;
    }
    workflow::ExecuteOptions options;
    options.clock = &clock;
    options.parallelism = 1;
    const llm::ModelRef model{"scripted", "equivalence", {}};
    const auto serial = workflow::execute(plan, model, provider, testing::sqlite_spec(db), options);
    options.parallelism = 4;
    const auto parallel = workflow::execute(plan, model, provider, testing::sqlite_spec(db), options);
    if (serial.task_results != parallel.task_results) {
      return {false, "graph " + std::to_string(g) + ": task results differ between parallelism 1 and 4"};
    }
    if (serial.answer != parallel.answer) return {false, "graph " + std::to_string(g) + ": answers differ"};
    ++graphs;
    tasks_total += plan.tasks.size();
  }
  return {true, std::to_string(graphs) + " graphs (" + std::to_string(tasks_total) +
                    " tasks): TaskResult sets identical at parallelism 1 and 4"};
}

// Exhaustive scan with independently computed embeddings.
std::vector<double> oracle_embedding(const std::string& text, std::size_t dim) {
  std::string lowered;
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !lowered.empty();
      continue;
    }
    if (pending_space) lowered += ' ';
    pending_space = false;
    lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  const std::string padded = " " + lowered + " ";
  std::vector<double> v(dim, 0.0);
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      std::uint64_t h = 0xcbf29ce484222325ull;
      for (std::size_t j = 0; j < n; ++j) h = (h ^ static_cast<unsigned char>(padded[i + j])) * 0x100000001b3ull;
      v[h % dim] += 1.0;
    }
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

CheckResult retrieval_exactness() {
  static const char* kWords[] = {"revenue", "orders", "region", "quarter", "fiscal", "product", "customer", "churn",
                                 "margin", "inventory", "supplier", "discount", "refund", "category", "monthly",
                                 "active", "cohort", "shipment", "warehouse", "competitor", "growth", "target",
                                 "pipeline", "invoice", "ledger", "budget", "forecast", "retention", "basket", "sku"};
  std::mt19937_64 rng(31337);
  auto phrase = [&](int min_words, int max_words) {
    const int n = min_words + static_cast<int>(rng() % static_cast<unsigned>(max_words - min_words + 1));
    std::string s;
    for (int i = 0; i < n; ++i) s += std::string(i ? " " : "") + kWords[rng() % std::size(kWords)];
    return s;
  };
  std::vector<retrieval::KnowledgeDoc> docs;
  for (int i = 0; i < 1000; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "doc%04d", i);
    docs.push_back({id, phrase(1, 3), phrase(4, 12) + " " + id, {}});
  }
  const std::size_t dim = 256;
  retrieval::HashingEmbedder embedder(dim);
  const auto index = retrieval::Index::build(docs, {}, embedder);

  std::vector<std::vector<double>> doc_vectors;
  for (const auto& d : docs) doc_vectors.push_back(oracle_embedding(retrieval::embedding_text(d), dim));

  std::size_t checks = 0;
  for (int q = 0; q < 100; ++q) {
    const auto query = phrase(1, 6);
    const auto qv = oracle_embedding(query, dim);
    std::vector<std::pair<double, std::string>> scored;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < dim; ++j) s += qv[j] * doc_vectors[i][j];
      scored.emplace_back(s, docs[i].id);
    }
    // Scores within 1e-12 are the same score computed in a different order.
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (std::fabs(a.first - b.first) > 1e-12) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t k : {1u, 3u, 10u}) {
      const auto ctx = index.retrieve(query, k, 0, embedder);
      if (ctx.knowledge_hits.size() != k) return {false, "query " + std::to_string(q) + ": wrong hit count"};
      for (std::size_t r = 0; r < k; ++r) {
        if (ctx.knowledge_hits[r].id != scored[r].second) {
          return {false, "query '" + query + "' k=" + std::to_string(k) + " rank " + std::to_string(r) + ": got " +
                             ctx.knowledge_hits[r].id + ", oracle " + scored[r].second};
        }
        if (std::fabs(ctx.knowledge_hits[r].score - scored[r].first) > 1e-12) {
          return {false, "query '" + query + "': score mismatch at rank " + std::to_string(r)};
        }
      }
      ++checks;
    }
  }
  return {true, std::to_string(checks) + " top-k lists over 1000 docs match the exhaustive scan exactly"};
}

CheckResult corpus_integrity() {
  testing::TempDir dir;
  std::mt19937_64 rng(500);
  static const char* kShapes[] = {
      "SELECT COUNT(*) FROM orders WHERE status = '{v}'", "SELECT name FROM products WHERE unit_price > {n}",
      "select region, count(*) from customers where name like '{v}%' group by region",
      "SELECT product_id, SUM(sales) FROM monthly_sales WHERE month = '{v}' GROUP BY product_id",
      "SELECT * FROM competitors WHERE country = '{v}' ORDER BY name"};
  std::ofstream out(dir / "records.jsonl", std::ios::binary);
  for (int i = 0; i < 500; ++i) {
    // A small value range so that duplicates (some respelled) occur.
    const auto n = std::to_string(rng() % 60);
    auto sql = text::replace_all(text::replace_all(kShapes[rng() % std::size(kShapes)], "{v}", "v" + n), "{n}", n);
    if (rng() % 4 == 0) sql = testing::rewrite_sql(sql, rng, sql::Dialect::ansi);
    std::string comment = "comment " + std::to_string(i);
    nlohmann::json row = {{"sql", sql}, {"comment", comment}, {"source", "synthetic"}};
    if (rng() % 3) row["id"] = "s" + std::to_string(i);
    switch (rng() % 20) {
      case 0: out << "{broken json " << i << "\n"; continue;
      case 1: row["comment"] = "  "; break;
      case 2: row["sql"] = "SELEC * FROM orders"; break;
      case 3: row.erase("sql"); break;
      default: break;
    }
    out << row.dump() << "\n";
  }
  out.close();

  const auto ingested = corpus::ingest_sql_comments({dir / "records.jsonl"});
  const auto& s = ingested.stats;
  if (s.read != 500) return {false, "read " + std::to_string(s.read) + " of 500 lines"};
  if (ingested.records.size() != s.kept || s.kept != s.read - s.rejected()) {
    return {false, "kept " + std::to_string(s.kept) + " != read " + std::to_string(s.read) + " - rejected " +
                       std::to_string(s.rejected())};
  }
  const auto unique = corpus::dedupe(ingested.records);
  if (corpus::dedupe(unique) != unique) return {false, "dedupe is not idempotent"};
  const auto examples = corpus::build_revllm_sft(unique);
  corpus::write_sft(dir / "sft.jsonl", examples);
  const auto text = testing::read_text(dir / "sft.jsonl");
  const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  if (lines != examples.size()) return {false, "export wrote " + std::to_string(lines) + " lines"};
  if (corpus::read_sft(dir / "sft.jsonl") != examples) return {false, "export/re-read round trip differs"};
  return {true, "read " + std::to_string(s.read) + ", rejected " + std::to_string(s.rejected()) + ", kept " +
                    std::to_string(s.kept) + ", unique " + std::to_string(unique.size()) +
                    "; round trip and dedupe idempotence hold"};
}

CheckResult judge_parser_fuzz() {
  std::mt19937_64 rng(10000);
  llm::ScriptedProvider silent;  // the repair request returns nothing useful
  silent.set_fallback("");
  const llm::ModelRef model{"scripted", "judge", {}};
  std::size_t passed = 0, parse_failures = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string reply(rng() % 200, '\0');
    for (auto& c : reply) c = static_cast<char>(rng() % 256);
    judge::Verdict v;
    try {
      v = judge::judge_reply(judge::Mode::qse, reply, model, silent, {});
    } catch (const std::exception& e) {
      return {false, std::string("parser threw: ") + e.what()};
    }
    if (v.outcome == judge::Outcome::passed) {
      ++passed;
    } else if (v.outcome == judge::Outcome::failed && v.parse_failure) {
      ++parse_failures;
    } else {
      return {false, "random input " + std::to_string(i) + " produced outcome " + std::string(to_string(v.outcome))};
    }
  }
  // Structured near-miss replies: exact agreement with the regex grammar.
  std::size_t structured = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto reply = testing::random_judge_reply(rng);
    const auto v = judge::judge_reply(judge::Mode::qse, reply, model, silent, {});
    const auto expected = testing::oracle_verdict(reply);
    const bool ok = expected ? (v.passed() == *expected && !v.parse_failure)
                             : (v.outcome == judge::Outcome::failed && v.parse_failure);
    if (!ok) return {false, "structured reply disagrees with the grammar: " + text::single_line(reply)};
    ++structured;
  }
  return {true, "10000 random strings -> " + std::to_string(passed) + " passed, " + std::to_string(parse_failures) +
                    " failed with parse flag, 0 crashes; " + std::to_string(structured) +
                    " structured replies match the grammar"};
}

CheckResult report_arithmetic() {
  std::mt19937_64 rng(86);
  const std::vector<judge::Mode> all = {judge::Mode::exe, judge::Mode::qse, judge::Mode::sse};
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = rng() % 250;
    std::vector<judge::ItemVerdicts> items;
    std::map<judge::Mode, std::array<std::size_t, 3>> expected;
    for (std::size_t i = 0; i < n; ++i) {
      judge::ItemVerdicts iv;
      iv.id = "i" + std::to_string(i);
      for (auto m : all) {
        const auto roll = rng() % 4;
        if (roll == 3) {
          ++expected[m][2];  // absent verdict counts as skipped
          continue;
        }
        judge::Verdict v;
        v.mode = m;
        v.outcome = static_cast<judge::Outcome>(roll);
        ++expected[m][roll];
        iv.verdicts.emplace(m, v);
      }
      items.push_back(std::move(iv));
    }
    const auto report = judge::aggregate(items, all, "m");
    const auto doc = judge::to_json(report);
    for (auto m : all) {
      const auto& c = report.counts.at(m);
      if (c.passed + c.failed + c.skipped != n) return {false, "counts do not sum to |items|"};
      if (c.passed != expected[m][0] || c.failed != expected[m][1] || c.skipped != expected[m][2])
        return {false, "counts differ from recount"};
      const auto denominator = expected[m][0] + expected[m][1];
      const auto key = std::string(judge::to_string(m));
      if (denominator == 0) {
        if (c.percentage() || !doc["percentages"][key].is_null()) return {false, "undefined percentage reported"};
        continue;
      }
      const double recomputed = static_cast<double>(expected[m][0]) * 100.0 / static_cast<double>(denominator);
      if (*c.percentage() != recomputed || doc["percentages"][key].get<double>() != recomputed)
        return {false, "percentage differs from recomputation"};
    }
  }
  const bool row_shape = judge::format_percentage(*judge::ModeCounts{173, 27, 0}.percentage()) == "86.5";
  if (!row_shape) return {false, "173 of 200 does not format as 86.5"};
  return {true, "1000 randomized verdict sets: sums and percentages exact"};
}

CheckResult fallback_behavior() {
  std::mt19937_64 rng(100);
  const std::string valid = R"([{"task_id":"t1","instruction":"a"},{"task_id":"t2","instruction":"b","depends_on":["t1"]}])";
  auto malformed = [&]() -> std::string {
    switch (rng() % 9) {
      case 0: return valid.substr(0, rng() % valid.size());
      case 1: return R"([{"task_id":"a","instruction":"x","depends_on":["b"]},{"task_id":"b","instruction":"y","depends_on":["a"]}])";
      case 2: return R"([{"task_id":"a","instruction":"x","depends_on":["a"]}])";
      case 3: return R"([{"task_id":"a","instruction":"x","depends_on":["ghost"]}])";
      case 4: return "[]";
      case 5: {
        std::string many = "[";
        for (int i = 0; i < 11 + static_cast<int>(rng() % 5); ++i)
          many += std::string(i ? "," : "") + R"({"task_id":"t)" + std::to_string(i) + R"(","instruction":"x"})";
        return many + "]";
      }
      case 6: {
        std::string s(rng() % 80, ' ');
        for (auto& c : s) c = static_cast<char>(rng() % 256);
        return s;
      }
      case 7: return "```json\n{\"plan\": \"none\"}\n```";
      default: return R"([{"task_id":"a","instruction":"","kind":"sql"},{"task_id":"a","instruction":"y"}])";
    }
  };
  std::size_t fallbacks = 0;
  for (int i = 0; i < 100; ++i) {
    llm::ScriptedProvider provider;
    provider.add_rule(R"(\[workflow-planner-repair\])", malformed());
    provider.add_rule(R"(\[workflow-planner\])", malformed());
    const std::string query = "question number " + std::to_string(i);
    try {
      const auto plan = workflow::plan(query, {}, {"scripted", "planner", {}}, provider);
      workflow::validate_tasks(plan.tasks, plan.max_tasks);
      if (!plan.fallback || plan.tasks.size() != 1 || plan.tasks[0].instruction != query)
        return {false, "output " + std::to_string(i) + " did not yield the single-task fallback"};
      ++fallbacks;
    } catch (const std::exception& e) {
      return {false, "output " + std::to_string(i) + " raised: " + e.what()};
    }
  }
  return {true, std::to_string(fallbacks) + "/100 malformed or cyclic planner outputs fell back to a valid single-task plan"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"demo_determinism", demo_determinism},
      {"exe_oracle_suite", exe_oracle_suite},
      {"exe_rewrite_invariance", exe_rewrite_invariance},
      {"scheduler_soundness", scheduler_soundness},
      {"scheduler_equivalence", scheduler_equivalence},
      {"retrieval_exactness", retrieval_exactness},
      {"corpus_pipeline_integrity", corpus_integrity},
      {"judge_parser_totality", judge_parser_fuzz},
      {"report_arithmetic", report_arithmetic},
      {"fallback_behavior", fallback_behavior},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("unexpected exception: ") + e.what()};
    }
    std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
    failures += r.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all acceptance checks passed" : std::to_string(failures) + " acceptance check(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
