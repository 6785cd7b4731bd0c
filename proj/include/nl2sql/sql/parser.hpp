#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2sql/sql/dialect.hpp"
#include "nl2sql/sql/lexer.hpp"

namespace nl2sql::sql {

enum class StatementKind {
  select,  // includes WITH ... SELECT and VALUES
  insert,
  update,
  remove,  // DELETE
  replace,
  create_table,
  create_other,
  drop,
  alter,
  pragma,
  transaction,
  explain,
  other,
};

std::string_view to_string(StatementKind kind) noexcept;

/// True only for statements that cannot modify the database.
bool is_read_only(StatementKind kind) noexcept;

struct ColumnDef {
  std::string name;
  std::string type;  // declared type spelling, may be empty
};

struct CreateTableInfo {
  std::string table_name;
  std::vector<ColumnDef> columns;
};

struct ParsedStatement {
  StatementKind kind = StatementKind::other;
  /// The outermost query carries ORDER BY (subqueries and window specs
  /// do not count).
  bool top_level_order_by = false;
  std::optional<CreateTableInfo> create_table;
  /// Statement tokens without the trailing ';' and the end marker.
  std::vector<Token> tokens;
  /// Parallel to `tokens`: the parser consumed this word as a keyword.
  std::vector<bool> keyword;
};

/// Parses exactly one statement (an optional trailing ';' is allowed).
/// Throws SqlParseError with a position on any syntax error, including a
/// second statement after ';'.
ParsedStatement parse_statement(std::string_view sql, Dialect dialect = Dialect::ansi);

/// True when `sql` parses as a single statement.
bool parses(std::string_view sql, Dialect dialect = Dialect::ansi) noexcept;

/// Canonical spelling: keywords uppercased, comments dropped, whitespace runs
/// collapsed to one space, trailing ';' removed. Identifiers and literals keep
/// their spelling. Throws SqlParseError when the input does not parse.
std::string normalize_sql(std::string_view sql, Dialect dialect = Dialect::ansi);

std::string render_normalized(const ParsedStatement& statement);

}  // namespace nl2sql::sql
