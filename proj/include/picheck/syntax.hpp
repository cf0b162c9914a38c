#pragma once

#include <picheck/terms.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace picheck {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct Token {
  enum class Kind { ident, number, alias, punct, end };
  Kind kind = Kind::end;
  std::string text;  // punct: the symbol; alias: the full spelling
  Alias alias;
  std::size_t offset = 0;
  std::size_t line = 1;
  std::size_t column = 1;
};

// Tokens: identifiers [A-Za-z_][A-Za-z0-9_'#]*, digit runs, aliases
// "@p.q:base", and punctuation (two-character "->", "!=" and single
// characters). "#" at token start begins a comment to end of line.
std::vector<Token> tokenize(std::string_view text);

class TokenStream {
 public:
  explicit TokenStream(std::string_view text) : tokens_(tokenize(text)) {}

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::end; }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const;
  bool is_ident(std::string_view word, std::size_t ahead = 0) const;
  bool accept_punct(std::string_view p);
  bool accept_ident(std::string_view word);
  void expect_punct(std::string_view p);
  void expect_ident(std::string_view word);
  std::string expect_identifier();
  [[noreturn]] void fail(const std::string& what) const;
  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

Message parse_message(TokenStream& ts);

bool is_keyword(std::string_view word);

}  // namespace picheck
