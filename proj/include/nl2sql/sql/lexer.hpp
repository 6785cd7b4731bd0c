#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nl2sql/sql/dialect.hpp"

namespace nl2sql::sql {

enum class TokenKind {
  word,               // bare identifier or keyword; the parser decides which
  quoted_identifier,  // "x", `x`, [x]
  string,             // 'x'
  number,
  blob,       // X'0A'
  parameter,  // ?, ?1, :name, @name, $name
  op,         // operators and punctuation, including ( ) , ; .
  end,
};

struct Token {
  TokenKind kind = TokenKind::end;
  std::string text;  // exact source spelling
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
  bool space_before = false;  // whitespace or a comment separates it from the previous token
};

/// Splits `sql` into tokens, dropping whitespace and comments. The result
/// always ends with a TokenKind::end token. Throws SqlParseError on
/// unterminated literals/comments and characters the dialect does not allow.
std::vector<Token> tokenize(std::string_view sql, Dialect dialect = Dialect::ansi);

/// Strips one level of identifier quoting and undoubles escaped quotes.
std::string unquote_identifier(const Token& token);

}  // namespace nl2sql::sql
