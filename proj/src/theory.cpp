#include "bt/theory.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bt/calculus.hpp"
#include "bt/wellformed.hpp"

namespace bt {

namespace {

// ---------------------------------------------------------------------------
// pattern parsing

std::vector<ArityPattern::Item> parse_items(TokenStream& ts) {
  std::vector<ArityPattern::Item> items;
  for (;;) {
    if (ts.at(Tok::Caret)) {
      ts.next();
      items.push_back({false, Dir::Out, {}});
    } else if (ts.at(Tok::Ident) &&
               ts.peek().text.find_first_not_of('v') == std::string::npos) {
      size_t n = ts.next().text.size();
      for (size_t i = 0; i < n; ++i) items.push_back({false, Dir::In, {}});
    } else if (ts.at(Tok::LParen)) {
      ts.next();
      ArityPattern::Item it{true, Dir::Out, parse_items(ts)};
      ts.expect(Tok::RParen, "')'");
      ts.expect(Tok::Star, "'*'");
      items.push_back(std::move(it));
    } else {
      return items;
    }
  }
}

void print_items(const std::vector<ArityPattern::Item>& items,
                 std::string& out) {
  for (const ArityPattern::Item& it : items) {
    if (it.star) {
      out += '(';
      print_items(it.sub, out);
      out += ")*";
    } else {
      out += it.dir == Dir::Out ? '^' : 'v';
    }
  }
}

// ---------------------------------------------------------------------------
// language inclusion
//
// Both a pattern and an edgeterm denote regular languages over {^, v}: a
// group contributes its body starred.  Admission is inclusion of the
// edgeterm's language in the pattern's.  Both sides compile to the same
// little regex IR, the pattern side is determinised, and a product walk
// looks for a word accepted on the left but not on the right.

struct Rex {
  bool star = false;
  Dir dir = Dir::Out;
  std::vector<Rex> sub;
};

std::vector<Rex> rex_of(const std::vector<ArityPattern::Item>& items) {
  std::vector<Rex> out;
  for (const ArityPattern::Item& it : items)
    out.push_back({it.star, it.dir, it.star ? rex_of(it.sub) : std::vector<Rex>{}});
  return out;
}

std::vector<Rex> rex_of(const EdgeTerm& edges) {
  std::vector<Rex> out;
  for (const EdgeItem& it : edges) {
    if (const auto* e = std::get_if<DirectedEdge>(&it.v))
      out.push_back({false, e->dir, {}});
    else
      out.push_back({true, Dir::Out, rex_of(std::get<Group>(it.v).body)});
  }
  return out;
}

struct Nfa {
  std::vector<std::vector<std::pair<Dir, int>>> lab;
  std::vector<std::vector<int>> eps;
  int start = 0, accept = 0;

  int fresh() {
    lab.emplace_back();
    eps.emplace_back();
    return static_cast<int>(lab.size()) - 1;
  }
};

int build(Nfa& n, const std::vector<Rex>& seq, int cur) {
  for (const Rex& r : seq) {
    int nx = n.fresh();
    if (!r.star) {
      n.lab[cur].push_back({r.dir, nx});
    } else {
      int inner = n.fresh();
      int end = build(n, r.sub, inner);
      n.eps[cur].push_back(inner);   // enter the loop
      n.eps[end].push_back(inner);   // go round again
      n.eps[cur].push_back(nx);      // skip entirely
      n.eps[end].push_back(nx);      // leave after a pass
    }
    cur = nx;
  }
  return cur;
}

Nfa compile(const std::vector<Rex>& seq) {
  Nfa n;
  n.start = n.fresh();
  n.accept = build(n, seq, n.start);
  return n;
}

std::set<int> eclose(const Nfa& n, std::set<int> s) {
  std::vector<int> todo(s.begin(), s.end());
  while (!todo.empty()) {
    int q = todo.back();
    todo.pop_back();
    for (int t : n.eps[q])
      if (s.insert(t).second) todo.push_back(t);
  }
  return s;
}

std::set<int> step(const Nfa& n, const std::set<int>& s, Dir d) {
  std::set<int> out;
  for (int q : s)
    for (const auto& [dir, t] : n.lab[q])
      if (dir == d) out.insert(t);
  return eclose(n, out);
}

// Full subset automaton of the pattern, closed under both letters.  State 0
// is the start set; the empty set appears as an ordinary (dead) state.
struct Dfa {
  std::vector<std::set<int>> states;
  std::vector<int> succ[2];  // indexed by Dir
  std::vector<bool> accepting;
};

Dfa determinise(const Nfa& n) {
  Dfa d;
  std::map<std::set<int>, int> index;
  auto intern = [&](const std::set<int>& s) {
    auto [it, fresh] = index.emplace(s, static_cast<int>(d.states.size()));
    if (fresh) {
      d.states.push_back(s);
      d.succ[0].push_back(-1);
      d.succ[1].push_back(-1);
      d.accepting.push_back(s.count(n.accept) > 0);
    }
    return it->second;
  };
  intern(eclose(n, {n.start}));
  for (size_t i = 0; i < d.states.size(); ++i)
    for (Dir dir : {Dir::Out, Dir::In}) {
      std::set<int> next = step(n, d.states[i], dir);
      d.succ[static_cast<int>(dir)][i] = intern(next);
    }
  return d;
}

}  // namespace

ArityPattern parse_arity(TokenStream& ts) { return {parse_items(ts)}; }

ArityPattern parse_arity(const std::string& src) {
  TokenStream ts(src);
  ArityPattern p = parse_arity(ts);
  if (!ts.at(Tok::End)) ts.fail("end of input");
  return p;
}

std::string to_string(const ArityPattern& p) {
  std::string out;
  print_items(p.items, out);
  return out;
}

bool arity_admits(const ArityPattern& pat, const EdgeTerm& edges,
                  std::string* witness) {
  Nfa left = compile(rex_of(edges));
  Dfa right = determinise(compile(rex_of(pat.items)));

  struct Node {
    std::set<int> ls;
    int rs;
    int parent;
    char letter;
  };
  std::vector<Node> seen{{eclose(left, {left.start}), 0, -1, 0}};
  std::set<std::pair<std::set<int>, int>> visited{{seen[0].ls, 0}};
  for (size_t i = 0; i < seen.size(); ++i) {
    Node node = seen[i];
    if (node.ls.count(left.accept) && !right.accepting[node.rs]) {
      if (witness) {
        std::string w;
        for (int at = static_cast<int>(i); seen[at].parent >= 0;
             at = seen[at].parent)
          w += seen[at].letter;
        std::reverse(w.begin(), w.end());
        *witness = w;
      }
      return false;
    }
    for (Dir d : {Dir::Out, Dir::In}) {
      std::set<int> ls = step(left, node.ls, d);
      if (ls.empty()) continue;  // the edgeterm has no such word
      int rs = right.succ[static_cast<int>(d)][node.rs];
      if (visited.emplace(ls, rs).second)
        seen.push_back({std::move(ls), rs, static_cast<int>(i),
                        d == Dir::Out ? '^' : 'v'});
    }
  }
  return true;
}

const Equation* Theory::find_axiom(const std::string& name) const {
  for (const auto& [n, eq] : axioms)
    if (n == name) return &eq;
  return nullptr;
}

Theory parse_theory(const std::string& src) {
  TokenStream ts(src);
  Theory thy;
  std::set<std::string> axiom_names;
  while (!ts.at(Tok::End)) {
    if (ts.at_ident("gen")) {
      ts.next();
      Token name = ts.expect(Tok::Ident, "a generator name");
      if (name.text.empty() || !islower(static_cast<unsigned char>(name.text[0])))
        throw ParseError(name.offset, name.line, name.col, "a generator name",
                         "'" + name.text + "'");
      if (thy.gens.count(name.text))
        throw ParseError(name.offset, name.line, name.col,
                         "a fresh generator name", "'" + name.text + "'");
      ts.expect(Tok::Colon, "':'");
      thy.gens.emplace(name.text, parse_arity(ts));
    } else if (ts.at_ident("axiom")) {
      ts.next();
      Token name = ts.expect(Tok::Ident, "an axiom name");
      if (!axiom_names.insert(name.text).second)
        throw ParseError(name.offset, name.line, name.col,
                         "a fresh axiom name", "'" + name.text + "'");
      ts.expect(Tok::Colon, "':'");
      TensorExpr lhs = parse_tensor(ts);
      ts.expect(Tok::Eq, "'='");
      TensorExpr rhs = parse_tensor(ts);
      thy.axioms.emplace_back(name.text,
                              Equation{std::move(lhs), std::move(rhs)});
    } else {
      ts.fail("a declaration");
    }
  }
  return thy;
}

namespace {

void check_arities_walk(const Theory& thy, const TensorExpr& t) {
  for (const Factor& f : t.factors) {
    if (const auto* g = std::get_if<Generator>(&f.v)) {
      auto it = thy.gens.find(g->name);
      if (it == thy.gens.end())
        throw IllFormed("generator '" + g->name + "' is not declared");
      std::string w;
      if (!arity_admits(it->second, g->edges, &w))
        throw IllFormed("generator '" + g->name + "' can reach leg word '" +
                        w + "' outside its arity '" + to_string(it->second) +
                        "'");
    } else if (const auto* b = std::get_if<Box>(&f.v)) {
      check_arities_walk(thy, b->body);
    }
  }
}

}  // namespace

void check_arities(const Theory& thy, const TensorExpr& t) {
  check_arities_walk(thy, t);
}

void validate_theory(const Theory& thy) {
  for (const auto& [name, eq] : thy.axioms) {
    require_wellformed(eq.lhs, "axiom " + name + " left side");
    require_wellformed(eq.rhs, "axiom " + name + " right side");
    check_arities(thy, eq.lhs);
    check_arities(thy, eq.rhs);
    CompatReport cr = check_compatible(eq.lhs, eq.rhs);
    if (!cr.ok())
      throw IllFormed("axiom " + name + ": " + cr.mismatch);
  }
}

}  // namespace bt
