#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "pcase/error.hpp"
#include "pcase/typesys.hpp"

namespace pcase::detail {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

// Shared tokenizer for types and terms. `--` starts a line comment.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      out.push_back({Tok::Sym, "->", i});
      i += 2;
      continue;
    }
    if (c == '@') {
      if (i + 1 < src.size() && (src[i + 1] == '0' || src[i + 1] == '1')) {
        out.push_back({Tok::Sym, std::string(src.substr(i, 2)), i});
        i += 2;
        continue;
      }
      fail(ErrorKind::SyntaxError, "expected @0 or @1 at position " + std::to_string(i));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), i});
      i = j;
      continue;
    }
    if (std::string_view("+*.()[],\\:").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), i});
      ++i;
      continue;
    }
    fail(ErrorKind::SyntaxError,
         "unexpected character '" + std::string(1, c) + "' at position " + std::to_string(i));
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  void expect_sym(std::string_view s) {
    if (!is_sym(s)) error("expected '" + std::string(s) + "'");
    next();
  }
  std::string expect_ident() {
    if (peek().kind != Tok::Ident) error("expected identifier");
    return next().text;
  }
  [[noreturn]] void error(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    fail(ErrorKind::SyntaxError, what + " at position " + std::to_string(t.pos) + ", found " + found);
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

TypeExprP parse_type_from(TokenStream& ts);

}  // namespace pcase::detail
