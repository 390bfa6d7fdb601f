#include <cctype>

#include "bt/syntax.hpp"

namespace bt {

ParseError::ParseError(size_t offset_, size_t line_, size_t col_,
                       std::string expected_, std::string found_)
    : BtError("parse error at " + std::to_string(line_) + ":" +
              std::to_string(col_) + ": expected " + expected_ + ", found " +
              found_),
      offset(offset_),
      line(line_),
      col(col_),
      expected(std::move(expected_)),
      found(std::move(found_)) {}

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0, line = 1, col = 1;
  auto push = [&](Tok k, size_t start, size_t startcol, std::string text) {
    out.push_back(Token{k, std::move(text), start, line, startcol});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    size_t start = i, startcol = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      ++i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '_'))
        ++i;
      // one numeric suffix: a.1, A.12
      if (i + 1 < src.size() && src[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        i += 2;
        while (i < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[i])))
          ++i;
      }
      col += i - start;
      push(Tok::Ident, start, startcol, src.substr(start, i - start));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ++i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i])))
        ++i;
      col += i - start;
      push(Tok::Number, start, startcol, src.substr(start, i - start));
      continue;
    }
    Tok k;
    switch (c) {
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '<': k = Tok::Langle; break;
      case '>': k = Tok::Rangle; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '=': k = Tok::Eq; break;
      case ':': k = Tok::Colon; break;
      case '*': k = Tok::Star; break;
      case '^': k = Tok::Caret; break;
      case ',': k = Tok::Comma; break;
      default:
        throw ParseError(start, line, startcol, "a token",
                         "'" + std::string(1, c) + "'");
    }
    ++i;
    ++col;
    push(k, start, startcol, std::string(1, c));
  }
  out.push_back(Token{Tok::End, "", i, line, col});
  return out;
}

const Token& TokenStream::peek(size_t ahead) const {
  size_t p = pos + ahead;
  if (p >= toks.size()) p = toks.size() - 1;  // End is always last
  return toks[p];
}

const Token& TokenStream::next() {
  const Token& t = peek();
  if (t.kind != Tok::End) ++pos;
  return t;
}

const Token& TokenStream::expect(Tok k, const std::string& what) {
  if (!at(k)) fail(what);
  return next();
}

void TokenStream::fail(const std::string& expected) const {
  const Token& t = peek();
  std::string found =
      t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
  throw ParseError(t.offset, t.line, t.col, expected, found);
}

namespace {

bool lower_initial(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}
bool upper_initial(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

std::string parse_box_name(TokenStream& ts) {
  if (!ts.at(Tok::Ident) || !upper_initial(ts.peek().text))
    ts.fail("a box name (uppercase initial)");
  return ts.next().text;
}

std::string parse_edge_name(TokenStream& ts) {
  if (!ts.at(Tok::Ident) || !lower_initial(ts.peek().text))
    ts.fail("an edge name (lowercase initial)");
  return ts.next().text;
}

DirectedEdge parse_dedge(TokenStream& ts) {
  Dir d;
  if (ts.at(Tok::Plus))
    d = Dir::Out;
  else if (ts.at(Tok::Minus))
    d = Dir::In;
  else
    ts.fail("'+' or '-'");
  ts.next();
  return DirectedEdge{d, parse_edge_name(ts)};
}

// Parses items until `end`; accepts both bare and parenthesized edges.
EdgeTerm parse_eterm(TokenStream& ts, Tok end) {
  EdgeTerm et;
  while (!ts.at(end)) {
    switch (ts.peek().kind) {
      case Tok::Plus:
      case Tok::Minus:
        et.push_back(EdgeItem{parse_dedge(ts)});
        break;
      case Tok::LParen: {
        ts.next();
        DirectedEdge e = parse_dedge(ts);
        ts.expect(Tok::RParen, "')'");
        et.push_back(EdgeItem{e});
        break;
      }
      case Tok::LBrack: {
        ts.next();
        EdgeTerm body = parse_eterm(ts, Tok::Rangle);
        ts.expect(Tok::Rangle, "'>'");
        et.push_back(EdgeItem{Group{Rot::CW, parse_box_name(ts), std::move(body)}});
        break;
      }
      case Tok::Langle: {
        ts.next();
        EdgeTerm body = parse_eterm(ts, Tok::RBrack);
        ts.expect(Tok::RBrack, "']'");
        et.push_back(EdgeItem{Group{Rot::ACW, parse_box_name(ts), std::move(body)}});
        break;
      }
      default:
        ts.fail("an edgeterm item");
    }
  }
  return et;
}

bool at_factor_start(const TokenStream& ts) {
  switch (ts.peek().kind) {
    case Tok::Number:
      return ts.peek().text == "1";
    case Tok::LBrack:
      return true;
    case Tok::Ident:
      // a generator or wire only when braces follow; bare idents belong
      // to whatever syntax surrounds the tensor
      return ts.peek(1).kind == Tok::LBrace;
    default:
      return false;
  }
}

Factor parse_factor(TokenStream& ts) {
  if (ts.at(Tok::Number)) {
    if (ts.peek().text != "1") ts.fail("a factor");
    ts.next();
    return Factor{Empty{}};
  }
  if (ts.at(Tok::LBrack)) {
    ts.next();
    TensorExpr body;
    if (ts.at(Tok::RBrack))
      body.factors.push_back(Factor{Empty{}});  // []A is short for [1]A
    else
      body = parse_tensor(ts);
    ts.expect(Tok::RBrack, "']'");
    return Factor{Box{parse_box_name(ts), std::move(body)}};
  }
  if (ts.at(Tok::Ident)) {
    std::string name = ts.next().text;
    ts.expect(Tok::LBrace, "'{'");
    if (name == "id") {
      if (!ts.at(Tok::Plus)) ts.fail("'+'");
      ts.next();
      EdgeName out = parse_edge_name(ts);
      if (!ts.at(Tok::Minus)) ts.fail("'-'");
      ts.next();
      EdgeName in = parse_edge_name(ts);
      ts.expect(Tok::RBrace, "'}'");
      return Factor{IdWire{std::move(out), std::move(in)}};
    }
    if (!lower_initial(name)) {
      const Token& t = ts.peek();
      throw ParseError(t.offset, t.line, t.col,
                       "a generator name (lowercase initial)", "'" + name + "'");
    }
    EdgeTerm et = parse_eterm(ts, Tok::RBrace);
    ts.expect(Tok::RBrace, "'}'");
    return Factor{Generator{std::move(name), std::move(et)}};
  }
  ts.fail("a factor");
}

}  // namespace

TensorExpr parse_tensor(TokenStream& ts) {
  if (!at_factor_start(ts)) ts.fail("a factor");
  TensorExpr t;
  while (at_factor_start(ts)) t.factors.push_back(parse_factor(ts));
  return t;
}

TensorExpr parse_tensor(const std::string& src) {
  TokenStream ts(src);
  TensorExpr t = parse_tensor(ts);
  if (!ts.at(Tok::End)) ts.fail("end of input");
  return t;
}

}  // namespace bt
