#pragma once

#include <string_view>

namespace nl2sql::sql {

/// Lexical dialect. `ansi` is the default: double-quoted identifiers only.
/// `sqlite` adds backtick and bracket identifiers; `mysql` adds backtick
/// identifiers, backslash string escapes and `#` comments.
enum class Dialect { ansi, sqlite, mysql };

/// Throws ConfigError for unknown names.
Dialect parse_dialect(std::string_view name);
std::string_view to_string(Dialect dialect) noexcept;

}  // namespace nl2sql::sql
