#include "nl2sql/sql/lexer.hpp"

#include <array>

#include "nl2sql/common/error.hpp"

namespace nl2sql::sql {

namespace {

bool is_word_start(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_word_char(unsigned char c) noexcept {
  return is_word_start(c) || (c >= '0' && c <= '9') || c == '$';
}
bool is_digit(unsigned char c) noexcept { return c >= '0' && c <= '9'; }
bool is_hex(unsigned char c) noexcept {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Lexer {
 public:
  Lexer(std::string_view src, Dialect dialect) : src_(src), dialect_(dialect) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    bool space = false;
    while (true) {
      space |= skip_trivia();
      Token tok;
      tok.offset = pos_;
      tok.line = line_;
      tok.column = column();
      tok.space_before = space;
      space = false;
      if (pos_ >= src_.size()) {
        tok.kind = TokenKind::end;
        out.push_back(std::move(tok));
        return out;
      }
      tok.kind = lex_one(tok);
      tok.text = std::string(src_.substr(tok.offset, pos_ - tok.offset));
      out.push_back(std::move(tok));
    }
  }

 private:
  std::size_t column() const noexcept { return pos_ - line_start_ + 1; }
  unsigned char peek(std::size_t ahead = 0) const noexcept {
    return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
  }
  void advance() noexcept {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t line, std::size_t col) const {
    throw SqlParseError(msg, line, col);
  }

  // Returns true when anything was skipped.
  bool skip_trivia() {
    bool skipped = false;
    while (pos_ < src_.size()) {
      unsigned char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '#' && dialect_ == Dialect::mysql) {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        const std::size_t line = line_, col = column();
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (pos_ >= src_.size()) fail("unterminated block comment", line, col);
          advance();
        }
        advance();
        advance();
      } else {
        break;
      }
      skipped = true;
    }
    return skipped;
  }

  void quoted(char close, bool backslash_escapes, const char* what, std::size_t line, std::size_t col) {
    advance();  // opening quote
    while (true) {
      if (pos_ >= src_.size()) fail(std::string("unterminated ") + what, line, col);
      unsigned char c = peek();
      if (backslash_escapes && c == '\\' && pos_ + 1 < src_.size()) {
        advance();
        advance();
        continue;
      }
      advance();
      if (c == static_cast<unsigned char>(close)) {
        if (peek() == static_cast<unsigned char>(close) && close != ']') {
          advance();  // doubled quote escape
          continue;
        }
        return;
      }
    }
  }

  TokenKind lex_one(const Token& tok) {
    const unsigned char c = peek();
    const std::size_t line = tok.line, col = tok.column;

    if ((c == 'x' || c == 'X') && peek(1) == '\'') {
      advance();
      const std::size_t body = pos_ + 1;
      quoted('\'', false, "blob literal", line, col);
      for (std::size_t i = body; i + 1 < pos_; ++i) {
        if (!is_hex(static_cast<unsigned char>(src_[i]))) fail("malformed blob literal", line, col);
      }
      return TokenKind::blob;
    }
    if (is_word_start(c)) {
      while (is_word_char(peek())) advance();
      return TokenKind::word;
    }
    if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
      lex_number(line, col);
      return TokenKind::number;
    }
    switch (c) {
      case '\'':
        quoted('\'', dialect_ == Dialect::mysql, "string literal", line, col);
        return TokenKind::string;
      case '"':
        quoted('"', false, "quoted identifier", line, col);
        return TokenKind::quoted_identifier;
      case '`':
        if (dialect_ == Dialect::ansi) break;
        quoted('`', false, "quoted identifier", line, col);
        return TokenKind::quoted_identifier;
      case '[':
        if (dialect_ != Dialect::sqlite) break;
        quoted(']', false, "quoted identifier", line, col);
        return TokenKind::quoted_identifier;
      case '?':
        advance();
        while (is_digit(peek())) advance();
        return TokenKind::parameter;
      case ':':
      case '@':
      case '$':
        if (is_word_start(peek(1))) {
          advance();
          while (is_word_char(peek())) advance();
          return TokenKind::parameter;
        }
        break;
      default:
        break;
    }
    static constexpr std::array<std::string_view, 9> kTwoChar = {"||", "<=", ">=", "<>", "!=", "==", "<<", ">>", "::"};
    for (std::string_view op : kTwoChar) {
      if (src_.substr(pos_, 2) == op) {
        advance();
        advance();
        return TokenKind::op;
      }
    }
    static constexpr std::string_view kOneChar = "+-*/%<>=&|~(),;.";
    if (kOneChar.find(static_cast<char>(c)) != std::string_view::npos) {
      advance();
      return TokenKind::op;
    }
    std::string shown = c >= 0x20 && c < 0x7f ? std::string(1, static_cast<char>(c)) : "\\x" + std::to_string(c);
    fail("unexpected character '" + shown + "'", line, col);
  }

  void lex_number(std::size_t line, std::size_t col) {
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X') && is_hex(peek(2))) {
      advance();
      advance();
      while (is_hex(peek())) advance();
    } else {
      while (is_digit(peek())) advance();
      if (peek() == '.') {
        advance();
        while (is_digit(peek())) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t ahead = 1;
        if (peek(1) == '+' || peek(1) == '-') ahead = 2;
        if (!is_digit(peek(ahead))) fail("malformed number", line, col);
        for (std::size_t i = 0; i < ahead; ++i) advance();
        while (is_digit(peek())) advance();
      }
    }
    if (is_word_char(peek())) fail("malformed number", line, col);
  }

  std::string_view src_;
  Dialect dialect_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view sql, Dialect dialect) {
  return Lexer(sql, dialect).run();
}

std::string unquote_identifier(const Token& token) {
  if (token.kind != TokenKind::quoted_identifier || token.text.size() < 2) return token.text;
  const char open = token.text.front();
  const char close = open == '[' ? ']' : open;
  std::string out;
  std::string_view body(token.text.data() + 1, token.text.size() - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    out.push_back(body[i]);
    if (body[i] == close && close != ']' && i + 1 < body.size() && body[i + 1] == close) ++i;
  }
  return out;
}

}  // namespace nl2sql::sql
