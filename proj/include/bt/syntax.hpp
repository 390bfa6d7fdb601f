#pragma once

#include <string>
#include <vector>

#include "bt/term.hpp"

namespace bt {

struct ParseError : BtError {
  size_t offset, line, col;  // line/col are 1-based
  std::string expected, found;
  ParseError(size_t offset, size_t line, size_t col, std::string expected,
             std::string found);
};

std::string print(const TensorExpr&);
std::string print(const Factor&);
std::string print(const EdgeTerm&);  // top-level form, bare directed edges

// Token stream shared by the tensor, theory and proof parsers.
enum class Tok {
  Ident,
  Number,
  Plus,
  Minus,
  LBrace,
  RBrace,
  LBrack,
  RBrack,
  Langle,
  Rangle,
  LParen,
  RParen,
  Eq,
  Colon,
  Star,
  Caret,
  Comma,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  size_t offset, line, col;
};

std::vector<Token> tokenize(const std::string& src);

struct TokenStream {
  std::vector<Token> toks;
  size_t pos = 0;

  explicit TokenStream(std::vector<Token> t) : toks(std::move(t)) {}
  explicit TokenStream(const std::string& src) : toks(tokenize(src)) {}

  const Token& peek(size_t ahead = 0) const;
  const Token& next();
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const std::string& text) const {
    return at(Tok::Ident) && peek().text == text;
  }
  const Token& expect(Tok k, const std::string& what);
  [[noreturn]] void fail(const std::string& expected) const;
};

// Parses a whole source string; rejects trailing input.
TensorExpr parse_tensor(const std::string& src);
// Parses greedily from the cursor, stopping at the first token that
// cannot start a factor. Rejects zero factors.
TensorExpr parse_tensor(TokenStream& ts);

std::string to_json(const TensorExpr&);
TensorExpr from_json(const std::string&);

}  // namespace bt
