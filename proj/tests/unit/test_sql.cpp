#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nl2sql/common/error.hpp"
#include "nl2sql/sql/lexer.hpp"
#include "nl2sql/sql/parser.hpp"
#include "test_support.hpp"

using namespace nl2sql;
using namespace nl2sql::sql;

TEST_CASE("tokenizer splits literals, identifiers and operators") {
  const auto toks = tokenize("SELECT \"a b\", 'it''s', 1.5e3, x'0A' FROM t WHERE c >= ?1 -- tail", Dialect::sqlite);
  std::vector<TokenKind> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  CHECK(kinds == std::vector<TokenKind>{TokenKind::word, TokenKind::quoted_identifier, TokenKind::op, TokenKind::string,
                                        TokenKind::op, TokenKind::number, TokenKind::op, TokenKind::blob,
                                        TokenKind::word, TokenKind::word, TokenKind::word, TokenKind::word,
                                        TokenKind::op, TokenKind::parameter, TokenKind::end});
  CHECK(unquote_identifier(toks[1]) == "a b");
  CHECK(toks[3].text == "'it''s'");
}

TEST_CASE("lexer errors carry positions") {
  CHECK_THROWS_AS(tokenize("SELECT 'open"), SqlParseError);
  CHECK_THROWS_AS(tokenize("SELECT 1 /* open"), SqlParseError);
  try {
    tokenize("SELECT\n  12abc");
    FAIL("expected an error");
  } catch (const SqlParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("misspelled keyword is rejected") {
  // Ingest relies on this statement failing to parse.
  CHECK_FALSE(parses("SELEC * FROM t"));
  CHECK_THROWS_AS(parse_statement("SELEC * FROM t"), SqlParseError);
  CHECK(parses("SELECT * FROM t"));
}

TEST_CASE("normalize_sql examples") {
  CHECK(normalize_sql("select  a from t;") == "SELECT a FROM t");
  CHECK(normalize_sql("SELECT a FROM t") == "SELECT a FROM t");
  CHECK(normalize_sql("select a from t -- note") == "SELECT a FROM t");
  CHECK(normalize_sql("select /* x */ a\n\tfrom   t") == "SELECT a FROM t");
  CHECK(normalize_sql("select 'Mixed  Case' as Label from T") == "SELECT 'Mixed  Case' AS Label FROM T");
}

TEST_CASE("normalize_sql surfaces the parser diagnostic") {
  CHECK_THROWS_AS(normalize_sql("SELECT FROM WHERE"), SqlParseError);
}

TEST_CASE("normalize_sql is idempotent and invariant under rewrites") {
  std::mt19937_64 rng(1234);
  for (const auto& q : testing::shop_queries()) {
    const auto n = normalize_sql(q, Dialect::sqlite);
    CHECK(normalize_sql(n, Dialect::sqlite) == n);
    for (int i = 0; i < 10; ++i) {
      const auto r = testing::rewrite_sql(q, rng);
      CAPTURE(r);
      CHECK(normalize_sql(r, Dialect::sqlite) == n);
    }
  }
}

TEST_CASE("statement classification") {
  CHECK(parse_statement("SELECT 1").kind == StatementKind::select);
  CHECK(parse_statement("VALUES (1), (2)").kind == StatementKind::select);
  CHECK(parse_statement("WITH x AS (SELECT 1) SELECT * FROM x").kind == StatementKind::select);
  CHECK(parse_statement("WITH x AS (SELECT 1) DELETE FROM t WHERE a IN (SELECT * FROM x)").kind == StatementKind::remove);
  CHECK(parse_statement("INSERT INTO t (a) VALUES (1)").kind == StatementKind::insert);
  CHECK(parse_statement("UPDATE t SET a = 1 WHERE b = 2").kind == StatementKind::update);
  CHECK(parse_statement("DELETE FROM t").kind == StatementKind::remove);
  CHECK(parse_statement("DROP TABLE t").kind == StatementKind::drop);
  CHECK(parse_statement("ALTER TABLE t ADD COLUMN c INTEGER").kind == StatementKind::alter);
  CHECK(parse_statement("CREATE INDEX i ON t (a)").kind == StatementKind::create_other);
  CHECK(parse_statement("PRAGMA table_info(t)", Dialect::sqlite).kind == StatementKind::pragma);
  CHECK(parse_statement("BEGIN").kind == StatementKind::transaction);
  CHECK(parse_statement("EXPLAIN SELECT 1").kind == StatementKind::explain);
  CHECK(is_read_only(StatementKind::select));
  CHECK_FALSE(is_read_only(StatementKind::explain));
  CHECK_FALSE(is_read_only(StatementKind::insert));
}

TEST_CASE("exactly one statement is accepted") {
  CHECK(parses("SELECT 1;"));
  CHECK_FALSE(parses("SELECT 1; SELECT 2"));
  CHECK_FALSE(parses("SELECT 1; DROP TABLE t"));
  CHECK_FALSE(parses(""));
  CHECK_FALSE(parses("  -- only a comment"));
}

TEST_CASE("top-level ORDER BY detection ignores nested ones") {
  CHECK(parse_statement("SELECT a FROM t ORDER BY a").top_level_order_by);
  CHECK(parse_statement("SELECT a FROM t UNION SELECT b FROM u ORDER BY 1").top_level_order_by);
  CHECK_FALSE(parse_statement("SELECT a FROM (SELECT a FROM t ORDER BY a) s").top_level_order_by);
  CHECK_FALSE(parse_statement("SELECT a, RANK() OVER (ORDER BY b) FROM t").top_level_order_by);
  CHECK_FALSE(parse_statement("SELECT group_concat(a ORDER BY a) FROM t", Dialect::sqlite).top_level_order_by);
  CHECK_FALSE(parse_statement("SELECT a FROM t WHERE a IN (SELECT b FROM u ORDER BY b LIMIT 3)").top_level_order_by);
}

TEST_CASE("CREATE TABLE columns are extracted") {
  const auto p = parse_statement(
      "CREATE TABLE IF NOT EXISTS shop.orders (\n"
      "  order_id INTEGER PRIMARY KEY,\n"
      "  \"Customer Id\" INTEGER NOT NULL REFERENCES customers(id),\n"
      "  amount DECIMAL(10, 2) DEFAULT 0,\n"
      "  note VARCHAR(20),\n"
      "  flag,\n"
      "  CONSTRAINT pos CHECK (amount >= 0),\n"
      "  UNIQUE (order_id, note)\n"
      ")");
  REQUIRE(p.create_table.has_value());
  CHECK(p.create_table->table_name == "shop.orders");
  const auto& cols = p.create_table->columns;
  REQUIRE(cols.size() == 5);
  CHECK(cols[0].name == "order_id");
  CHECK(cols[0].type == "INTEGER");
  CHECK(cols[1].name == "Customer Id");
  CHECK(cols[2].type == "DECIMAL(10,2)");
  CHECK(cols[3].type == "VARCHAR(20)");
  CHECK(cols[4].name == "flag");
  CHECK(cols[4].type.empty());
}

TEST_CASE("dialect-specific syntax") {
  CHECK(parses("SELECT `a` FROM `t`", Dialect::mysql));
  CHECK(parses("SELECT [a] FROM [t]", Dialect::sqlite));
  CHECK_FALSE(parses("SELECT [a] FROM t", Dialect::ansi));
  CHECK(parses("SELECT a FROM t # comment", Dialect::mysql));
  CHECK(parses("CREATE TABLE t (a INT, KEY idx_a (a))", Dialect::mysql));
  CHECK_THROWS_AS(parse_dialect("oracle"), ConfigError);
  CHECK(parse_dialect("generic") == Dialect::ansi);
}

TEST_CASE("expression grammar coverage") {
  const char* ok[] = {
      "SELECT CAST(a AS INTEGER) FROM t",
      "SELECT CASE a WHEN 1 THEN 'x' ELSE 'y' END FROM t",
      "SELECT * FROM t WHERE a IS NOT NULL AND b NOT BETWEEN 1 AND 2",
      "SELECT * FROM t WHERE a NOT LIKE 'x%' ESCAPE '\\'",
      "SELECT * FROM t WHERE a IS NOT DISTINCT FROM b",
      "SELECT -a, +b, ~c, a || b FROM t",
      "SELECT COUNT(*) FILTER (WHERE a > 1) FROM t",
      "SELECT SUM(a) OVER (PARTITION BY b ORDER BY c ROWS BETWEEN UNBOUNDED PRECEDING AND CURRENT ROW) FROM t",
      "SELECT * FROM a LEFT OUTER JOIN b USING (id) CROSS JOIN c",
      "SELECT * FROM t LIMIT 10 OFFSET 5",
      "SELECT DATE '2024-01-01'",
      "SELECT EXISTS (SELECT 1)",
      "SELECT a FROM t GROUP BY a HAVING COUNT(*) > 1",
      "SELECT left(name, 3), replace(name, 'a', 'b') FROM t",
  };
  for (const char* sql : ok) {
    CAPTURE(sql);
    CHECK(parses(sql));
  }
  const char* bad[] = {"SELECT * FROM", "SELECT (1", "SELECT a FROM t WHERE", "SELECT a b c FROM t", "FROM t"};
  for (const char* sql : bad) {
    CAPTURE(sql);
    CHECK_FALSE(parses(sql));
  }
}
