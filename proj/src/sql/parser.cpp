#include "nl2sql/sql/parser.hpp"

#include <algorithm>
#include <array>
#include <initializer_list>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"

namespace nl2sql::sql {

namespace {

// Words that can never be bare identifiers or aliases.
constexpr std::array<std::string_view, 64> kReserved = {
    "ALL",      "ALTER",   "AND",        "AS",       "BETWEEN",   "BY",     "CASE",    "CAST",
    "CHECK",    "COLLATE", "CONSTRAINT", "CREATE",   "CROSS",     "DEFAULT", "DELETE", "DISTINCT",
    "DROP",     "ELSE",    "END",        "ESCAPE",   "EXCEPT",    "EXISTS", "FOREIGN", "FROM",
    "FULL",     "GLOB",    "GROUP",      "HAVING",   "ILIKE",     "IN",     "INNER",   "INSERT",
    "INTERSECT", "INTO",   "IS",         "ISNULL",   "JOIN",      "LEFT",   "LIKE",    "LIMIT",
    "NATURAL",  "NOT",     "NOTNULL",    "NULL",     "OFFSET",    "ON",     "OR",      "ORDER",
    "OUTER",    "PRIMARY", "REFERENCES", "REGEXP",   "RIGHT",     "SELECT", "SET",     "TABLE",
    "THEN",     "UNION",   "UNIQUE",     "UPDATE",   "USING",     "VALUES", "WHEN",    "WHERE",
};

bool is_reserved(std::string_view word) {
  return std::any_of(kReserved.begin(), kReserved.end(), [&](std::string_view r) { return text::iequals(r, word); });
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, Dialect dialect)
      : toks_(std::move(tokens)), keyword_(toks_.size(), false), dialect_(dialect) {}

  ParsedStatement run() {
    ParsedStatement out;
    out.kind = statement(out);
    accept_op(";");
    if (cur().kind != TokenKind::end) {
      fail(cur().text == ";" ? "empty statement after ';'" : "unexpected '" + cur().text + "' after end of statement");
    }
    std::size_t n = toks_.size() - 1;  // drop end marker
    if (n > 0 && toks_[n - 1].kind == TokenKind::op && toks_[n - 1].text == ";") --n;
    out.top_level_order_by = top_order_by_;
    out.keyword.assign(keyword_.begin(), keyword_.begin() + static_cast<std::ptrdiff_t>(n));
    toks_.resize(n);
    out.tokens = std::move(toks_);
    return out;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t ahead = 1) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == TokenKind::end; }

  [[noreturn]] void fail(const std::string& msg) const { throw SqlParseError(msg, cur().line, cur().column); }
  [[noreturn]] void expected(std::string_view what) const {
    if (at_end()) fail("unexpected end of input, expected " + std::string(what));
    fail("unexpected '" + cur().text + "', expected " + std::string(what));
  }

  static bool word_is(const Token& t, std::string_view kw) { return t.kind == TokenKind::word && text::iequals(t.text, kw); }
  bool is_kw(std::string_view kw) const { return word_is(cur(), kw); }
  bool is_op(std::string_view op) const { return cur().kind == TokenKind::op && cur().text == op; }
  bool is_any_kw(std::initializer_list<std::string_view> kws) const {
    return std::any_of(kws.begin(), kws.end(), [&](std::string_view k) { return is_kw(k); });
  }

  void take() {
    if (!at_end()) ++pos_;
  }
  void take_kw() {
    keyword_[pos_] = true;
    take();
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    take_kw();
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) expected(kw);
  }
  bool accept_op(std::string_view op) {
    if (!is_op(op)) return false;
    take();
    return true;
  }
  void expect_op(std::string_view op) {
    if (!accept_op(op)) expected("'" + std::string(op) + "'");
  }

  bool is_identifier() const {
    return cur().kind == TokenKind::quoted_identifier || (cur().kind == TokenKind::word && !is_reserved(cur().text));
  }
  std::string identifier(std::string_view what = "identifier") {
    if (!is_identifier()) expected(what);
    std::string name = unquote_identifier(cur());
    take();
    return name;
  }
  std::string qualified_name() {
    std::string name = identifier("name");
    while (is_op(".") && (peek().kind == TokenKind::word || peek().kind == TokenKind::quoted_identifier)) {
      take();
      name += "." + identifier("name");
    }
    return name;
  }

  // Consumes tokens up to ';' or end, requiring balanced parentheses. Reserved
  // words inside are marked as keywords so normalization uppercases them.
  void skip_rest() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && is_op(";")) break;
      if (is_op("(")) ++depth;
      if (is_op(")")) {
        if (depth == 0) fail("unbalanced ')'");
        --depth;
      }
      if (cur().kind == TokenKind::word && is_reserved(cur().text)) keyword_[pos_] = true;
      take();
    }
    if (depth != 0) fail("unbalanced '('");
  }

  // Skips a balanced region until a top-level ',' or ')' (not consumed).
  void skip_element() {
    int depth = 0;
    while (!at_end()) {
      if (depth == 0 && (is_op(",") || is_op(")"))) return;
      if (is_op("(")) ++depth;
      if (is_op(")")) --depth;
      if (cur().kind == TokenKind::word && is_reserved(cur().text)) keyword_[pos_] = true;
      take();
    }
    expected("')'");
  }

  // ---- statements ----------------------------------------------------------
  StatementKind statement(ParsedStatement& out) {
    if (accept_kw("EXPLAIN")) {
      if (accept_kw("QUERY")) expect_kw("PLAN");
      ParsedStatement inner;
      statement(inner);
      return StatementKind::explain;
    }
    if (is_kw("SELECT") || is_kw("VALUES") || is_op("(")) {
      select_statement(0);
      return StatementKind::select;
    }
    if (is_kw("WITH")) {
      with_clause(0);
      if (is_kw("SELECT") || is_kw("VALUES") || is_op("(")) {
        select_statement(0, /*after_with=*/true);
        return StatementKind::select;
      }
      if (is_kw("INSERT") || is_kw("REPLACE")) return insert();
      if (is_kw("UPDATE")) return update();
      if (is_kw("DELETE")) return remove();
      expected("SELECT, INSERT, UPDATE or DELETE after WITH");
    }
    if (is_kw("INSERT") || is_kw("REPLACE")) return insert();
    if (is_kw("UPDATE")) return update();
    if (is_kw("DELETE")) return remove();
    if (is_kw("CREATE")) return create(out);
    if (is_kw("DROP")) return drop();
    if (accept_kw("ALTER")) {
      expect_kw("TABLE");
      qualified_name();
      if (at_end() || is_op(";")) expected("ALTER TABLE action");
      skip_rest();
      return StatementKind::alter;
    }
    if (accept_kw("PRAGMA")) {
      qualified_name();
      skip_rest();
      return StatementKind::pragma;
    }
    if (is_any_kw({"BEGIN", "COMMIT", "ROLLBACK", "SAVEPOINT", "RELEASE", "START"}) || is_kw("END")) {
      take_kw();
      skip_rest();
      return StatementKind::transaction;
    }
    if (is_any_kw({"ATTACH", "DETACH", "VACUUM", "ANALYZE", "REINDEX", "TRUNCATE", "GRANT", "REVOKE", "MERGE",
                   "SHOW", "DESCRIBE", "USE", "CALL", "COPY", "LOCK"})) {
      take_kw();
      skip_rest();
      return StatementKind::other;
    }
    expected("a statement");
  }

  void with_clause(int depth) {
    expect_kw("WITH");
    accept_kw("RECURSIVE");
    do {
      identifier("common table expression name");
      if (accept_op("(")) {
        do identifier("column name");
        while (accept_op(","));
        expect_op(")");
      }
      expect_kw("AS");
      if (accept_kw("NOT")) expect_kw("MATERIALIZED");
      else accept_kw("MATERIALIZED");
      expect_op("(");
      select_statement(depth + 1);
      expect_op(")");
    } while (accept_op(","));
  }

  void select_statement(int depth, bool after_with = false) {
    if (!after_with && is_kw("WITH")) with_clause(depth);
    select_core(depth);
    while (is_any_kw({"UNION", "INTERSECT", "EXCEPT", "MINUS"})) {
      take_kw();
      if (!accept_kw("ALL")) accept_kw("DISTINCT");
      select_core(depth);
    }
    if (accept_kw("ORDER")) {
      expect_kw("BY");
      if (depth == 0) top_order_by_ = true;
      ordering_list();
    }
    if (accept_kw("LIMIT")) {
      expr();
      if (accept_kw("OFFSET") || accept_op(",")) expr();
    } else if (accept_kw("OFFSET")) {
      expr();
      if (!accept_kw("ROWS")) accept_kw("ROW");
    }
    if (accept_kw("FETCH")) {
      if (!accept_kw("FIRST")) expect_kw("NEXT");
      if (!is_kw("ROWS") && !is_kw("ROW")) expr();
      if (!accept_kw("ROWS")) expect_kw("ROW");
      expect_kw("ONLY");
    }
  }

  void select_core(int depth) {
    if (accept_op("(")) {
      select_statement(depth + 1);
      expect_op(")");
      return;
    }
    if (accept_kw("VALUES")) {
      do {
        expect_op("(");
        expr_list();
        expect_op(")");
      } while (accept_op(","));
      return;
    }
    expect_kw("SELECT");
    if (!accept_kw("DISTINCT")) accept_kw("ALL");
    do result_column();
    while (accept_op(","));
    if (accept_kw("FROM")) from_clause();
    if (accept_kw("WHERE")) expr();
    if (accept_kw("GROUP")) {
      expect_kw("BY");
      expr_list();
    }
    if (accept_kw("HAVING")) expr();
    if (accept_kw("WINDOW")) {
      do {
        identifier("window name");
        expect_kw("AS");
        window_spec();
      } while (accept_op(","));
    }
  }

  void result_column() {
    if (accept_op("*")) return;
    if (is_identifier() && peek().kind == TokenKind::op && peek().text == "." && peek(2).kind == TokenKind::op &&
        peek(2).text == "*") {
      take();
      take();
      take();
      return;
    }
    expr();
    optional_alias();
  }

  void optional_alias() {
    if (accept_kw("AS")) {
      if (cur().kind == TokenKind::string) take();
      else identifier("alias");
      return;
    }
    // Clause words that are not reserved but cannot start an implicit alias.
    if (is_any_kw({"WINDOW", "RETURNING", "FETCH", "MINUS"})) return;
    if (is_identifier() || cur().kind == TokenKind::string) take();
  }

  void from_clause() {
    table_or_subquery();
    while (true) {
      if (accept_op(",")) {
        table_or_subquery();
        continue;
      }
      bool natural = accept_kw("NATURAL");
      bool join = false;
      if (accept_kw("JOIN")) {
        join = true;
      } else if (accept_kw("INNER") || accept_kw("CROSS")) {
        expect_kw("JOIN");
        join = true;
      } else if (is_any_kw({"LEFT", "RIGHT", "FULL"})) {
        take_kw();
        accept_kw("OUTER");
        expect_kw("JOIN");
        join = true;
      }
      if (!join) {
        if (natural) expected("JOIN");
        return;
      }
      table_or_subquery();
      if (accept_kw("ON")) {
        expr();
      } else if (accept_kw("USING")) {
        expect_op("(");
        do identifier("column name");
        while (accept_op(","));
        expect_op(")");
      }
    }
  }

  void table_or_subquery() {
    if (accept_op("(")) {
      if (is_kw("SELECT") || is_kw("WITH") || is_kw("VALUES") || is_op("(")) {
        select_statement(1);
      } else {
        from_clause();
      }
      expect_op(")");
      optional_alias();
      return;
    }
    qualified_name();
    if (accept_op("(")) {  // table-valued function
      if (!is_op(")")) expr_list();
      expect_op(")");
    }
    optional_alias();
  }

  void ordering_list() {
    do {
      expr();
      if (!accept_kw("ASC")) accept_kw("DESC");
      if (accept_kw("NULLS")) {
        if (!accept_kw("FIRST")) expect_kw("LAST");
      }
    } while (accept_op(","));
  }

  void expr_list() {
    do expr();
    while (accept_op(","));
  }

  StatementKind insert() {
    StatementKind kind = StatementKind::insert;
    if (accept_kw("REPLACE")) {
      kind = StatementKind::replace;
    } else {
      expect_kw("INSERT");
      if (accept_kw("OR")) {
        if (!is_any_kw({"REPLACE", "ROLLBACK", "ABORT", "FAIL", "IGNORE"})) expected("conflict resolution");
        take_kw();
      }
      accept_kw("IGNORE");
    }
    expect_kw("INTO");
    qualified_name();
    if (accept_kw("AS")) identifier("alias");
    if (is_op("(") && !(peek().kind == TokenKind::word && (word_is(peek(), "SELECT") || word_is(peek(), "WITH")))) {
      take();
      do identifier("column name");
      while (accept_op(","));
      expect_op(")");
    }
    if (accept_kw("DEFAULT")) {
      expect_kw("VALUES");
    } else if (is_kw("VALUES") || is_kw("SELECT") || is_kw("WITH") || is_op("(")) {
      select_statement(1);
    } else {
      expected("VALUES or SELECT");
    }
    if (accept_kw("ON") || accept_kw("RETURNING")) skip_rest();
    return kind;
  }

  StatementKind update() {
    expect_kw("UPDATE");
    if (accept_kw("OR")) take_kw();
    qualified_name();
    optional_alias();
    expect_kw("SET");
    do {
      if (accept_op("(")) {
        do identifier("column name");
        while (accept_op(","));
        expect_op(")");
      } else {
        qualified_name();
      }
      expect_op("=");
      expr();
    } while (accept_op(","));
    if (accept_kw("FROM")) from_clause();
    if (accept_kw("WHERE")) expr();
    if (accept_kw("RETURNING")) skip_rest();
    return StatementKind::update;
  }

  StatementKind remove() {
    expect_kw("DELETE");
    expect_kw("FROM");
    qualified_name();
    optional_alias();
    if (accept_kw("WHERE")) expr();
    if (accept_kw("RETURNING")) skip_rest();
    return StatementKind::remove;
  }

  StatementKind drop() {
    expect_kw("DROP");
    if (!is_any_kw({"TABLE", "VIEW", "INDEX", "TRIGGER", "SCHEMA", "DATABASE"})) expected("object type after DROP");
    take_kw();
    if (accept_kw("IF")) expect_kw("EXISTS");
    qualified_name();
    skip_rest();
    return StatementKind::drop;
  }

  StatementKind create(ParsedStatement& out) {
    expect_kw("CREATE");
    if (!accept_kw("TEMP")) accept_kw("TEMPORARY");
    if (accept_kw("OR")) expect_kw("REPLACE");
    if (accept_kw("TABLE")) {
      out.create_table = create_table_body();
      return StatementKind::create_table;
    }
    accept_kw("UNIQUE");
    accept_kw("VIRTUAL");
    if (!is_any_kw({"INDEX", "VIEW", "TRIGGER", "TABLE", "SCHEMA", "DATABASE", "SEQUENCE"})) {
      expected("object type after CREATE");
    }
    take_kw();
    if (accept_kw("IF")) {
      expect_kw("NOT");
      expect_kw("EXISTS");
    }
    qualified_name();
    skip_rest();
    return StatementKind::create_other;
  }

  CreateTableInfo create_table_body() {
    if (accept_kw("IF")) {
      expect_kw("NOT");
      expect_kw("EXISTS");
    }
    CreateTableInfo info;
    info.table_name = qualified_name();
    if (accept_kw("AS")) {
      select_statement(1);
      return info;
    }
    expect_op("(");
    do {
      const bool mysql_index = dialect_ == Dialect::mysql && is_any_kw({"KEY", "INDEX", "FULLTEXT", "SPATIAL"});
      if (is_any_kw({"CONSTRAINT", "PRIMARY", "UNIQUE", "CHECK", "FOREIGN"}) || mysql_index) {
        skip_element();
        continue;
      }
      info.columns.push_back(column_def());
    } while (accept_op(","));
    expect_op(")");
    skip_rest();  // table options such as WITHOUT ROWID or ENGINE=...
    return info;
  }

  ColumnDef column_def() {
    ColumnDef col;
    col.name = identifier("column name");
    static constexpr std::array<std::string_view, 14> kConstraintStart = {
        "CONSTRAINT", "PRIMARY", "NOT",     "NULL",      "UNIQUE", "CHECK",     "DEFAULT",
        "COLLATE",    "REFERENCES", "GENERATED", "AS", "COMMENT", "AUTO_INCREMENT", "AUTOINCREMENT"};
    auto starts_constraint = [&] {
      return std::any_of(kConstraintStart.begin(), kConstraintStart.end(), [&](std::string_view k) { return is_kw(k); });
    };
    std::string type;
    while (cur().kind == TokenKind::word && !starts_constraint() && !is_reserved(cur().text)) {
      if (!type.empty()) type += ' ';
      type += cur().text;
      take();
      if (is_op("(")) {
        type += '(';
        take();
        while (!is_op(")")) {
          if (at_end()) expected("')'");
          type += cur().text;
          take();
        }
        type += ')';
        take();
      }
    }
    col.type = std::move(type);
    skip_element();
    return col;
  }

  // ---- expressions ---------------------------------------------------------
  void expr() { or_expr(); }

  void or_expr() {
    and_expr();
    while (accept_kw("OR")) and_expr();
  }

  void and_expr() {
    not_expr();
    while (accept_kw("AND")) not_expr();
  }

  void not_expr() {
    while (accept_kw("NOT")) {
    }
    comparison();
  }

  void comparison() {
    bitwise();
    while (true) {
      if (is_op("=") || is_op("==") || is_op("!=") || is_op("<>") || is_op("<") || is_op("<=") || is_op(">") ||
          is_op(">=")) {
        take();
        bitwise();
        continue;
      }
      if (accept_kw("IS")) {
        accept_kw("NOT");
        if (accept_kw("DISTINCT")) expect_kw("FROM");
        bitwise();
        continue;
      }
      if (accept_kw("ISNULL") || accept_kw("NOTNULL")) continue;
      const bool negated = is_kw("NOT") && (word_is(peek(), "IN") || word_is(peek(), "LIKE") ||
                                             word_is(peek(), "GLOB") || word_is(peek(), "ILIKE") ||
                                             word_is(peek(), "REGEXP") || word_is(peek(), "BETWEEN") ||
                                             word_is(peek(), "NULL"));
      if (negated) take_kw();
      if (accept_kw("NULL")) {
        if (!negated) expected("operator");
        continue;
      }
      if (accept_kw("IN")) {
        in_rhs();
        continue;
      }
      if (accept_kw("LIKE") || accept_kw("GLOB") || accept_kw("ILIKE") || accept_kw("REGEXP")) {
        bitwise();
        if (accept_kw("ESCAPE")) bitwise();
        continue;
      }
      if (accept_kw("BETWEEN")) {
        bitwise();
        expect_kw("AND");
        bitwise();
        continue;
      }
      if (negated) expected("IN, LIKE or BETWEEN after NOT");
      return;
    }
  }

  void in_rhs() {
    if (accept_op("(")) {
      if (is_kw("SELECT") || is_kw("WITH") || is_kw("VALUES")) {
        select_statement(1);
      } else if (!is_op(")")) {
        expr_list();
      }
      expect_op(")");
      return;
    }
    qualified_name();
  }

  void bitwise() {
    additive();
    while (is_op("&") || is_op("|") || is_op("<<") || is_op(">>")) {
      take();
      additive();
    }
  }

  void additive() {
    multiplicative();
    while (is_op("+") || is_op("-")) {
      take();
      multiplicative();
    }
  }

  void multiplicative() {
    concat();
    while (is_op("*") || is_op("/") || is_op("%")) {
      take();
      concat();
    }
  }

  void concat() {
    unary();
    while (is_op("||")) {
      take();
      unary();
    }
  }

  void unary() {
    while (is_op("-") || is_op("+") || is_op("~")) take();
    postfix();
  }

  void postfix() {
    primary();
    while (true) {
      if (accept_kw("COLLATE")) {
        identifier("collation name");
      } else if (accept_op("::")) {
        type_name();
      } else {
        return;
      }
    }
  }

  void type_name() {
    if (cur().kind != TokenKind::word && cur().kind != TokenKind::quoted_identifier) expected("type name");
    take();
    while (cur().kind == TokenKind::word && !is_reserved(cur().text)) take();
    if (accept_op("(")) {
      unary();
      if (accept_op(",")) unary();
      expect_op(")");
    }
  }

  void primary() {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::number:
      case TokenKind::string:
      case TokenKind::blob:
      case TokenKind::parameter:
        take();
        return;
      case TokenKind::op:
        if (accept_op("(")) {
          if (is_kw("SELECT") || is_kw("WITH") || is_kw("VALUES")) {
            select_statement(1);
          } else {
            expr_list();
          }
          expect_op(")");
          return;
        }
        expected("expression");
      case TokenKind::quoted_identifier:
        qualified_name();
        return;
      case TokenKind::word:
        break;
      case TokenKind::end:
        expected("expression");
    }

    if (accept_kw("NULL") || accept_kw("TRUE") || accept_kw("FALSE")) return;
    if (accept_kw("CASE")) {
      if (!is_kw("WHEN")) expr();
      if (!is_kw("WHEN")) expected("WHEN");
      while (accept_kw("WHEN")) {
        expr();
        expect_kw("THEN");
        expr();
      }
      if (accept_kw("ELSE")) expr();
      expect_kw("END");
      return;
    }
    if (accept_kw("CAST")) {
      expect_op("(");
      expr();
      expect_kw("AS");
      type_name();
      expect_op(")");
      return;
    }
    if (accept_kw("EXISTS")) {
      expect_op("(");
      select_statement(1);
      expect_op(")");
      return;
    }
    if (is_kw("INTERVAL") && (peek().kind == TokenKind::string || peek().kind == TokenKind::number)) {
      take_kw();
      take();
      if (cur().kind == TokenKind::word && !is_reserved(cur().text)) take_kw();
      return;
    }
    if ((is_kw("DATE") || is_kw("TIME") || is_kw("TIMESTAMP")) && peek().kind == TokenKind::string) {
      take_kw();
      take();
      return;
    }
    // Reserved words that double as function names.
    const bool reserved_function = (is_kw("LEFT") || is_kw("RIGHT") || is_kw("REPLACE")) &&
                                   peek().kind == TokenKind::op && peek().text == "(";
    if (!is_identifier() && !reserved_function) expected("expression");
    if (peek().kind == TokenKind::op && peek().text == "(") {
      take();
      function_call();
      return;
    }
    qualified_name();
  }

  // After the function name has been consumed.
  void function_call() {
    expect_op("(");
    if (!accept_op("*") && !is_op(")")) {
      if (!accept_kw("DISTINCT")) accept_kw("ALL");
      expr_list();
      if (accept_kw("ORDER")) {
        expect_kw("BY");
        ordering_list();
      }
      if (accept_kw("SEPARATOR")) expr();
    }
    expect_op(")");
    if (is_kw("FILTER") && peek().kind == TokenKind::op && peek().text == "(") {
      take_kw();
      expect_op("(");
      expect_kw("WHERE");
      expr();
      expect_op(")");
    }
    if (accept_kw("OVER")) {
      if (is_op("(")) window_spec();
      else identifier("window name");
    }
  }

  void window_spec() {
    expect_op("(");
    if (is_identifier() && !is_kw("PARTITION") && !is_kw("ORDER") && !is_kw("ROWS") && !is_kw("RANGE") &&
        !is_kw("GROUPS")) {
      take();
    }
    if (accept_kw("PARTITION")) {
      expect_kw("BY");
      expr_list();
    }
    if (accept_kw("ORDER")) {
      expect_kw("BY");
      ordering_list();
    }
    if (is_kw("ROWS") || is_kw("RANGE") || is_kw("GROUPS")) {
      take_kw();
      int depth = 0;
      while (!(depth == 0 && is_op(")"))) {
        if (at_end()) expected("')'");
        if (is_op("(")) ++depth;
        if (is_op(")")) --depth;
        if (cur().kind == TokenKind::word) keyword_[pos_] = true;
        take();
      }
    }
    expect_op(")");
  }

  std::vector<Token> toks_;
  std::vector<bool> keyword_;
  std::size_t pos_ = 0;
  Dialect dialect_;
  bool top_order_by_ = false;
};

}  // namespace

std::string_view to_string(StatementKind kind) noexcept {
  switch (kind) {
    case StatementKind::select: return "select";
    case StatementKind::insert: return "insert";
    case StatementKind::update: return "update";
    case StatementKind::remove: return "delete";
    case StatementKind::replace: return "replace";
    case StatementKind::create_table: return "create_table";
    case StatementKind::create_other: return "create";
    case StatementKind::drop: return "drop";
    case StatementKind::alter: return "alter";
    case StatementKind::pragma: return "pragma";
    case StatementKind::transaction: return "transaction";
    case StatementKind::explain: return "explain";
    case StatementKind::other: return "other";
  }
  return "other";
}

bool is_read_only(StatementKind kind) noexcept { return kind == StatementKind::select; }

ParsedStatement parse_statement(std::string_view sql, Dialect dialect) {
  std::vector<Token> tokens = tokenize(sql, dialect);
  if (tokens.size() == 1) throw SqlParseError("empty statement", tokens[0].line, tokens[0].column);
  return Parser(std::move(tokens), dialect).run();
}

bool parses(std::string_view sql, Dialect dialect) noexcept {
  try {
    parse_statement(sql, dialect);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::string render_normalized(const ParsedStatement& statement) {
  std::string out;
  for (std::size_t i = 0; i < statement.tokens.size(); ++i) {
    const Token& t = statement.tokens[i];
    if (i > 0 && t.space_before) out.push_back(' ');
    out += statement.keyword[i] ? text::to_upper(t.text) : t.text;
  }
  return out;
}

std::string normalize_sql(std::string_view sql, Dialect dialect) {
  return render_normalized(parse_statement(sql, dialect));
}

}  // namespace nl2sql::sql
