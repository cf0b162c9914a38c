#include <picheck/syntax.hpp>

#include <array>
#include <cctype>

namespace picheck {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
            what),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '#';
}

constexpr std::array<std::string_view, 12> keywords = {
    "new", "in", "out", "if", "then", "else", "let", "def", "true", "false", "tau", "0"};

}  // namespace

bool is_keyword(std::string_view word) {
  for (auto k : keywords) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.offset = i;
    t.line = line;
    t.column = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Token::Kind::ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      t.kind = Token::Kind::number;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (c == '@') {
      // Alias when a prefix over {0,1,.} is followed by ':' and an identifier.
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == '0' || text[j] == '1' || text[j] == '.')) ++j;
      if (j < text.size() && text[j] == ':' && j + 1 < text.size() && ident_start(text[j + 1])) {
        std::string prefix;
        for (std::size_t k = i + 1; k < j; ++k) {
          if (text[k] != '.') prefix.push_back(text[k]);
        }
        std::size_t e = j + 1;
        while (e < text.size() && ident_char(text[e])) ++e;
        t.kind = Token::Kind::alias;
        t.alias = Alias{prefix, Name(text.substr(j + 1, e - j - 1))};
        t.text = std::string(text.substr(i, e - i));
        advance(e - i);
      } else {
        t.kind = Token::Kind::punct;
        t.text = "@";
        advance(1);
      }
    } else {
      t.kind = Token::Kind::punct;
      if (i + 1 < text.size()) {
        std::string two(text.substr(i, 2));
        if (two == "->" || two == "!=" || two == "<>") {
          t.text = two;
          advance(2);
          out.push_back(std::move(t));
          continue;
        }
      }
      static constexpr std::string_view allowed = "()[]{},.|+!=<>~&:;@";
      if (allowed.find(c) == std::string_view::npos) {
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
      }
      t.text = std::string(1, c);
      advance(1);
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::end;
  end.offset = text.size();
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const Token& TokenStream::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  if (k >= tokens_.size()) return tokens_.back();
  return tokens_[k];
}

Token TokenStream::next() {
  Token t = peek();
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool TokenStream::is_punct(std::string_view p, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::punct && t.text == p;
}

bool TokenStream::is_ident(std::string_view word, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::ident && t.text == word;
}

bool TokenStream::accept_punct(std::string_view p) {
  if (!is_punct(p)) return false;
  next();
  return true;
}

bool TokenStream::accept_ident(std::string_view word) {
  if (!is_ident(word)) return false;
  next();
  return true;
}

void TokenStream::expect_punct(std::string_view p) {
  if (!accept_punct(p)) fail("expected '" + std::string(p) + "'");
}

void TokenStream::expect_ident(std::string_view word) {
  if (!accept_ident(word)) fail("expected '" + std::string(word) + "'");
}

std::string TokenStream::expect_identifier() {
  const Token& t = peek();
  if (t.kind != Token::Kind::ident || is_keyword(t.text)) fail("expected identifier");
  return next().text;
}

void TokenStream::fail(const std::string& what) const {
  const Token& t = peek();
  std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
  throw ParseError(what + ", found " + found, t.line, t.column);
}

Message parse_message(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind == Token::Kind::alias) {
    return Message::alias(ts.next().alias);
  }
  if (t.kind != Token::Kind::ident || is_keyword(t.text)) ts.fail("expected message");
  std::string word = ts.next().text;
  if (auto sym = symbol_from_name(word); sym && ts.is_punct("(")) {
    ts.expect_punct("(");
    std::vector<Message> args;
    args.push_back(parse_message(ts));
    while (ts.accept_punct(",")) args.push_back(parse_message(ts));
    if (args.size() != arity(*sym)) {
      ts.fail(word + " expects " + std::to_string(arity(*sym)) + " argument(s)");
    }
    ts.expect_punct(")");
    return Message::apply(*sym, std::move(args));
  }
  return Message::name(word);
}

Message parse_message(std::string_view text) {
  TokenStream ts(text);
  Message m = parse_message(ts);
  if (!ts.at_end()) ts.fail("unexpected trailing input");
  return m;
}

}  // namespace picheck
