#include "bt/syntax.hpp"

namespace bt {

namespace {

// grouped: inside a group body edges are parenthesized and items are
// concatenated; at the top of an edgeterm they are bare and space-separated.
void print_eterm(const EdgeTerm& et, bool grouped, std::string& out) {
  bool first = true;
  for (const EdgeItem& it : et) {
    if (!grouped && !first) out += ' ';
    first = false;
    if (const auto* e = std::get_if<DirectedEdge>(&it.v)) {
      if (grouped) out += '(';
      out += dir_sign(e->dir);
      out += e->name;
      if (grouped) out += ')';
    } else {
      const Group& g = std::get<Group>(it.v);
      out += g.rot == Rot::CW ? '[' : '<';
      print_eterm(g.body, true, out);
      out += g.rot == Rot::CW ? '>' : ']';
      out += g.box;
    }
  }
}

void print_factor(const Factor& f, std::string& out);

void print_tensor(const TensorExpr& t, std::string& out) {
  if (t.factors.empty()) {
    out += '1';
    return;
  }
  bool first = true;
  for (const Factor& f : t.factors) {
    if (!first) out += ' ';
    first = false;
    print_factor(f, out);
  }
}

void print_factor(const Factor& f, std::string& out) {
  if (std::holds_alternative<Empty>(f.v)) {
    out += '1';
  } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
    out += "id{+";
    out += w->out;
    out += " -";
    out += w->in;
    out += '}';
  } else if (const auto* g = std::get_if<Generator>(&f.v)) {
    out += g->name;
    out += '{';
    print_eterm(g->edges, false, out);
    out += '}';
  } else {
    const Box& b = std::get<Box>(f.v);
    out += '[';
    print_tensor(b.body, out);
    out += ']';
    out += b.name;
  }
}

}  // namespace

std::string print(const TensorExpr& t) {
  std::string out;
  print_tensor(t, out);
  return out;
}

std::string print(const Factor& f) {
  std::string out;
  print_factor(f, out);
  return out;
}

std::string print(const EdgeTerm& et) {
  std::string out;
  print_eterm(et, false, out);
  return out;
}

}  // namespace bt
