#include "nl2sql/sql/dialect.hpp"

#include <string>

#include "nl2sql/common/error.hpp"
#include "nl2sql/common/text.hpp"

namespace nl2sql::sql {

Dialect parse_dialect(std::string_view name) {
  if (text::iequals(name, "ansi") || text::iequals(name, "generic")) return Dialect::ansi;
  if (text::iequals(name, "sqlite")) return Dialect::sqlite;
  if (text::iequals(name, "mysql")) return Dialect::mysql;
  throw ConfigError("unknown SQL dialect '" + std::string(name) + "' (expected ansi, sqlite or mysql)");
}

std::string_view to_string(Dialect dialect) noexcept {
  switch (dialect) {
    case Dialect::ansi: return "ansi";
    case Dialect::sqlite: return "sqlite";
    case Dialect::mysql: return "mysql";
  }
  return "ansi";
}

}  // namespace nl2sql::sql
