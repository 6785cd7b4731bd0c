#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include <json.hpp>

#include "nl2sql/common/error.hpp"
#include "nl2sql/judge/judge.hpp"
#include "nl2sql/llm/scripted.hpp"
#include "test_support.hpp"

using namespace nl2sql;
using namespace nl2sql::judge;

namespace {

const llm::ModelRef kJudge{"scripted", "judge", {}};

EvalItem item(std::string id, std::optional<std::string> gen, std::optional<std::string> gold) {
  EvalItem it;
  it.id = std::move(id);
  it.query = "question " + it.id;
  it.sql_gen = std::move(gen);
  it.sql_gold = std::move(gold);
  return it;
}

Verdict verdict(Outcome o) {
  Verdict v;
  v.outcome = o;
  return v;
}

}  // namespace

TEST_CASE("verdict line grammar") {
  CHECK(parse_verdict("looks fine\nVERDICT: CONSISTENT").consistent == true);
  CHECK(parse_verdict("VERDICT: INCONSISTENT - misses the filter").consistent == false);
  CHECK(parse_verdict("VERDICT: INCONSISTENT - misses the filter").rationale == "misses the filter");
  CHECK(parse_verdict("**Verdict:** consistent").consistent == true);
  CHECK(parse_verdict("> verdict : `Inconsistent`").consistent == false);
  CHECK(parse_verdict("## VERDICT: CONSISTENT\r\n").consistent == true);
  CHECK_FALSE(parse_verdict("VERDICT: CONSISTENTLY wrong").consistent.has_value());
  CHECK_FALSE(parse_verdict("The verdict: consistent").consistent.has_value());
  CHECK_FALSE(parse_verdict("VERDICT CONSISTENT").consistent.has_value());
  CHECK_FALSE(parse_verdict("").consistent.has_value());
  // The last verdict line wins.
  CHECK(parse_verdict("VERDICT: CONSISTENT\nOn reflection:\nVERDICT: INCONSISTENT").consistent == false);
}

TEST_CASE("verdict rationale falls back to the preceding text") {
  CHECK(parse_verdict("The join is wrong.\nIt double counts.\nVERDICT: INCONSISTENT").rationale ==
        "The join is wrong. It double counts.");
  CHECK(parse_verdict("VERDICT: CONSISTENT").rationale == "judge returned CONSISTENT");
  CHECK(parse_verdict("VERDICT: CONSISTENT \xE2\x80\x94 same rows").rationale == "same rows");
}

TEST_CASE("verdict parser agrees with a regex oracle on random replies") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 3000; ++i) {
    const auto reply = testing::random_judge_reply(rng);
    CAPTURE(reply);
    CHECK(parse_verdict(reply).consistent == testing::oracle_verdict(reply));
  }
}

TEST_CASE("order sensitivity policy") {
  CHECK(order_sensitive("SELECT a FROM t ORDER BY a", OrderPolicy::automatic));
  CHECK_FALSE(order_sensitive("SELECT a FROM (SELECT a FROM t ORDER BY a)", OrderPolicy::automatic));
  CHECK_FALSE(order_sensitive("garbage ORDER BY", OrderPolicy::automatic));
  CHECK(order_sensitive("SELECT 1", OrderPolicy::always));
  CHECK_FALSE(order_sensitive("SELECT a FROM t ORDER BY a", OrderPolicy::never));
  CHECK(parse_order_policy("auto") == OrderPolicy::automatic);
  CHECK_THROWS_AS(parse_order_policy("random"), ConfigError);
}

TEST_CASE("EXE agrees with the brute-force oracle on labeled pairs") {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  const auto spec = testing::sqlite_spec(db);
  for (const auto& pair : testing::exe_pairs()) {
    CAPTURE(pair.gen);
    CAPTURE(pair.gold);
    const bool oracle = testing::oracle_equivalent(db, pair.gen, pair.gold, pair.ordered);
    CHECK(oracle == pair.equivalent);
    const auto v = exe_score(item("p", pair.gen, pair.gold), spec);
    CHECK(v.passed() == oracle);
    CHECK(v.outcome != Outcome::skipped);
  }
}

TEST_CASE("EXE failure classes") {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  const auto spec = testing::sqlite_spec(db);

  const auto missing = exe_score(item("m", std::nullopt, std::string("SELECT 1")), spec);
  CHECK(missing.outcome == Outcome::skipped);
  CHECK(missing.missing_fields);

  const auto defect = exe_score(item("d", std::string("SELECT 1"), std::string("SELECT nope FROM products")), spec);
  CHECK(defect.outcome == Outcome::skipped);
  CHECK(defect.dataset_defect);
  CHECK(defect.rationale.find("gold SQL failed (execution)") == 0);

  const auto bad_gen = exe_score(item("g", std::string("SELEC 1"), std::string("SELECT 1")), spec);
  CHECK(bad_gen.outcome == Outcome::failed);
  CHECK(bad_gen.rationale.find("generated SQL failed") == 0);

  const auto mutating = exe_score(item("w", std::string("DELETE FROM products"), std::string("SELECT 1")), spec);
  CHECK(mutating.outcome == Outcome::failed);
  CHECK(mutating.rationale.find("(guardrail)") != std::string::npos);
  CHECK(testing::oracle_run(db, "SELECT COUNT(*) FROM products").rows[0][0].number_value == 12);

  CHECK_THROWS_AS(exe_score(item("x", std::string("SELECT 1"), std::string("SELECT 1")),
                            testing::sqlite_spec(dir / "missing.db")),
                  DbConnectionError);
}

TEST_CASE("EXE is symmetric on the labeled pairs") {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  ExeOptions unordered;
  unordered.order_policy = OrderPolicy::never;
  for (const auto& pair : testing::exe_pairs()) {
    CAPTURE(pair.gen);
    const auto ab = exe_score(item("a", pair.gen, pair.gold), testing::sqlite_spec(db), unordered);
    const auto ba = exe_score(item("b", pair.gold, pair.gen), testing::sqlite_spec(db), unordered);
    CHECK(ab.outcome == ba.outcome);
  }
}

TEST_CASE("QSE and SSE prompts, repair and failures") {
  llm::ScriptedProvider p;
  std::string qse_prompt;
  p.add_rule(R"(\[judge-repair\])", "VERDICT: CONSISTENT");
  p.add_rule("needs-repair", "I think it is fine.");
  p.add_rule("never-parses", "no verdict here");
  p.add_rule(R"(SELECT bad)", "Wrong table.\nVERDICT: INCONSISTENT");
  p.add_rule(".", [&](std::string_view prompt) {
    qse_prompt = std::string(prompt);
    return std::string("VERDICT: CONSISTENT");
  });

  auto it = item("q1", std::string("SELECT 1"), std::string("SELECT 1"));
  CHECK(qse_score(it, kJudge, p).passed());
  CHECK(qse_prompt.find("none") != std::string::npos);
  CHECK(qse_prompt.find(it.query) != std::string::npos);

  it.sql_gen = "SELECT bad";
  const auto inconsistent = sse_score(it, kJudge, p);
  CHECK(inconsistent.outcome == Outcome::failed);
  CHECK_FALSE(inconsistent.parse_failure);
  CHECK(inconsistent.rationale == "Wrong table.");

  it.query = "needs-repair";
  it.sql_gen = "SELECT 2";
  const auto repaired = qse_score(it, kJudge, p);
  CHECK(repaired.passed());
  CHECK(repaired.raw.find("--- repair ---") != std::string::npos);

  llm::ScriptedProvider stubborn;
  stubborn.set_fallback("still thinking");
  const auto unparseable = sse_score(it, kJudge, stubborn);
  CHECK(unparseable.outcome == Outcome::failed);
  CHECK(unparseable.parse_failure);

  llm::ScriptedProvider down;  // every call fails
  const auto unavailable = qse_score(it, kJudge, down);
  CHECK(unavailable.outcome == Outcome::skipped);
  CHECK(unavailable.judge_unavailable);

  CHECK(sse_score(item("s", std::string("SELECT 1"), std::nullopt), kJudge, p).missing_fields);
}

TEST_CASE("judge replies map onto passed or failed-with-parse-flag unless a well-formed INCONSISTENT appears") {
  std::mt19937_64 rng(77);
  llm::ScriptedProvider silent;
  silent.set_fallback("");
  for (int i = 0; i < 1000; ++i) {
    const auto reply = testing::random_judge_reply(rng);
    const auto v = judge_reply(Mode::qse, reply, kJudge, silent, {});
    const auto expected = testing::oracle_verdict(reply);
    if (!expected) {
      CHECK(v.outcome == Outcome::failed);
      CHECK(v.parse_failure);
    } else {
      CHECK(v.passed() == *expected);
      CHECK_FALSE(v.parse_failure);
    }
  }
}

TEST_CASE("percentages follow the passed over passed-plus-failed rule") {
  CHECK_FALSE(ModeCounts{}.percentage().has_value());
  CHECK_FALSE((ModeCounts{0, 0, 5}).percentage().has_value());
  CHECK(*ModeCounts{173, 27, 0}.percentage() == 86.5);
  CHECK(format_percentage(*ModeCounts{173, 27, 0}.percentage()) == "86.5");
  CHECK(format_percentage(*ModeCounts{2, 1, 0}.percentage()) == "66.7");
  CHECK(format_percentage(*ModeCounts{3, 2, 1}.percentage()) == "60.0");
  CHECK(format_percentage(100.0) == "100.0");
}

TEST_CASE("aggregate counts missing verdicts as skipped") {
  ItemVerdicts a{"a", {{Mode::exe, verdict(Outcome::passed)}, {Mode::sse, verdict(Outcome::failed)}}};
  ItemVerdicts b{"b", {{Mode::exe, verdict(Outcome::skipped)}}};
  const auto report = aggregate({a, b}, {Mode::exe, Mode::sse}, "m");
  CHECK(report.counts.at(Mode::exe).passed == 1);
  CHECK(report.counts.at(Mode::exe).skipped == 1);
  CHECK(report.counts.at(Mode::sse).failed == 1);
  CHECK(report.counts.at(Mode::sse).skipped == 1);

  const auto doc = to_json(report);
  CHECK(doc["percentages"]["exe"] == 100.0);
  CHECK(doc["percentages"]["sse"] == 0.0);
  CHECK(doc["items"][1]["verdicts"].size() == 1);

  const auto table = render_report_table(report);
  CHECK(table ==
        "Method | EXE (%) | SSE (%)\n"
        "------ | ------- | -------\n"
        "m      | 100.0   | 0.0\n"
        "\n"
        "EXE: passed 1, failed 0, skipped 1\n"
        "SSE: passed 0, failed 1, skipped 1\n");
  CHECK(render_report_table(aggregate({b}, {Mode::qse})).find("n/a") != std::string::npos);
}

TEST_CASE("evaluate_dataset scores modes, keeps dataset order and aborts on an unreachable database") {
  testing::TempDir dir;
  const auto db = testing::seed_shop(dir.path());
  llm::ScriptedProvider p;
  p.set_fallback("VERDICT: CONSISTENT");
  std::vector<EvalItem> items;
  for (int i = 0; i < 6; ++i)
    items.push_back(item("i" + std::to_string(i), std::string("SELECT COUNT(*) FROM products WHERE product_id > " + std::to_string(i)),
                         std::string("SELECT COUNT(*) FROM products WHERE product_id > 2")));
  items.push_back(item("no-gold", std::string("SELECT 1"), std::nullopt));

  EvalConfig config;
  config.modes = {Mode::exe, Mode::sse, Mode::exe};
  config.db = testing::sqlite_spec(db);
  config.sse_model = kJudge;
  config.sse_provider = &p;
  config.parallelism = 3;
  const auto report = evaluate_dataset(items, config);
  CHECK(report.modes == std::vector<Mode>{Mode::exe, Mode::sse});
  REQUIRE(report.items.size() == 7);
  for (std::size_t i = 0; i < items.size(); ++i) CHECK(report.items[i].id == items[i].id);
  CHECK(report.items[2].verdicts.at(Mode::exe).passed());
  CHECK(report.counts.at(Mode::exe).passed == 1);
  CHECK(report.counts.at(Mode::exe).failed == 5);
  CHECK(report.counts.at(Mode::exe).skipped == 1);
  CHECK(report.counts.at(Mode::sse).passed == 6);

  config.db = testing::sqlite_spec(dir / "gone.db");
  CHECK_THROWS_AS(evaluate_dataset(items, config), DbConnectionError);

  config.modes = {Mode::qse};
  CHECK_THROWS_AS(evaluate_dataset(items, config), ConfigError);
}

TEST_CASE("eval item JSON") {
  const auto it = item_from_json(nlohmann::json::parse(
      R"({"id":"e1","query":"q","sql_gen":"SELECT 1","sql_gold":null,"context":{"rendered":"CTX"}})"));
  CHECK(it.sql_gen == "SELECT 1");
  CHECK_FALSE(it.sql_gold.has_value());
  CHECK(it.context->rendered == "CTX");
  CHECK(item_from_json(nlohmann::json::parse(R"({"id":"e2","context":"plain"})")).context->rendered == "plain");
  CHECK_THROWS_AS(item_from_json(nlohmann::json::parse(R"({"query":"q"})")), ConfigError);
  CHECK_THROWS_AS(item_from_json(nlohmann::json::parse(R"({"id":"x","sql_gen":5})")), ConfigError);
  CHECK_THROWS_AS(parse_mode("xyz"), ConfigError);
}
