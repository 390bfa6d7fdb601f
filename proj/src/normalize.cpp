#include "bt/normalize.hpp"

#include <algorithm>
#include <map>

#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

namespace bt {

namespace {

// ---- structural cleanup ----

void drop_empty_groups(EdgeTerm& et) {
  for (EdgeItem& it : et)
    if (auto* g = std::get_if<Group>(&it.v)) drop_empty_groups(g->body);
  std::erase_if(et, [](const EdgeItem& it) {
    const auto* g = std::get_if<Group>(&it.v);
    return g && g->body.empty();
  });
}

void drop_units(TensorExpr& t) {
  for (Factor& f : t.factors) {
    if (auto* g = std::get_if<Generator>(&f.v))
      drop_empty_groups(g->edges);
    else if (auto* b = std::get_if<Box>(&f.v))
      drop_units(b->body);
  }
  std::erase_if(t.factors,
                [](const Factor& f) { return std::holds_alternative<Empty>(f.v); });
}

struct WireRef {
  std::vector<size_t> path;   // box factor indices down to the product
  size_t index;               // position of the wire in that product
  IdWire wire;
  std::vector<BoxName> nest;  // innermost first
};

void collect_wires(const TensorExpr& t, std::vector<size_t>& path,
                   std::vector<BoxName>& chain, std::vector<WireRef>& out) {
  for (size_t i = 0; i < t.factors.size(); ++i) {
    if (const auto* w = std::get_if<IdWire>(&t.factors[i].v)) {
      out.push_back(WireRef{path, i, *w,
                            {chain.rbegin(), chain.rend()}});
    } else if (const auto* b = std::get_if<Box>(&t.factors[i].v)) {
      path.push_back(i);
      chain.push_back(b->name);
      collect_wires(b->body, path, chain, out);
      chain.pop_back();
      path.pop_back();
    }
  }
}

TensorExpr* navigate(TensorExpr* t, const std::vector<size_t>& path) {
  for (size_t i : path) t = &std::get<Box>(t->factors[i].v).body;
  return t;
}

bool is_suffix(const std::vector<BoxName>& suf, const std::vector<BoxName>& of) {
  return suf.size() <= of.size() &&
         std::equal(suf.rbegin(), suf.rend(), of.rbegin());
}

// Contracts one identity wire against a partner occurrence at the wire's
// nest or outside it; deeper wires go first. A wire id{+x -y} either feeds
// some -x (which then takes over the name y) or is fed by some +y (which
// takes over x). Bare wires and circles stay.
bool contract_one(TensorExpr& t) {
  std::vector<WireRef> wires;
  std::vector<size_t> path;
  std::vector<BoxName> chain;
  collect_wires(t, path, chain, wires);
  std::stable_sort(wires.begin(), wires.end(),
                   [](const WireRef& a, const WireRef& b) {
                     return a.nest.size() > b.nest.size();
                   });
  auto occs = occurrences(t);
  for (const WireRef& w : wires) {
    if (w.wire.out == w.wire.in) continue;
    const Occurrence* consumer = nullptr;
    const Occurrence* producer = nullptr;
    for (const Occurrence& o : occs) {
      if (o.dir == Dir::In && o.name == w.wire.out && !consumer) consumer = &o;
      if (o.dir == Dir::Out && o.name == w.wire.in && !producer) producer = &o;
    }
    if (consumer && is_suffix(consumer->nctx, w.nest)) {
      navigate(&t, w.path)->factors.erase(
          navigate(&t, w.path)->factors.begin() + w.index);
      substitute_dir(t, Dir::In, w.wire.out, w.wire.in);
      return true;
    }
    if (producer && is_suffix(producer->nctx, w.nest)) {
      navigate(&t, w.path)->factors.erase(
          navigate(&t, w.path)->factors.begin() + w.index);
      substitute_dir(t, Dir::Out, w.wire.in, w.wire.out);
      return true;
    }
  }
  return false;
}

// ---- canonicalization ----

struct Classes {
  std::set<EdgeName> bound;
  std::set<EdgeName> renameable;
  std::set<EdgeName> kept;  // free names that must survive verbatim
};

Classes classify(const TensorExpr& t, const std::set<EdgeName>& renameable_free) {
  Classes c;
  for (const auto& [name, use] : edge_uses(t)) {
    if (use.out && use.in)
      c.bound.insert(name);
    else if (renameable_free.count(name))
      c.renameable.insert(name);
    else
      c.kept.insert(name);
  }
  return c;
}

// Renaming-invariant sort key: bound and renameable names collapse to
// placeholders, everything else prints as-is.
void key_name(Dir d, const EdgeName& n, const Classes& c, std::string& out) {
  out += dir_sign(d);
  if (c.bound.count(n))
    out += "?b";
  else if (c.renameable.count(n))
    out += "?f";
  else
    out += n;
}

void key_eterm(const EdgeTerm& et, const Classes& c, std::string& out) {
  for (const EdgeItem& it : et) {
    if (const auto* e = std::get_if<DirectedEdge>(&it.v)) {
      out += '(';
      key_name(e->dir, e->name, c, out);
      out += ')';
    } else {
      const Group& g = std::get<Group>(it.v);
      out += g.rot == Rot::CW ? '[' : '<';
      key_eterm(g.body, c, out);
      out += g.rot == Rot::CW ? '>' : ']';
      out += g.box;
    }
  }
}

void key_factor(const Factor& f, const Classes& c, std::string& out) {
  if (std::holds_alternative<Empty>(f.v)) {
    out += '1';
  } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
    out += "id{";
    key_name(Dir::Out, w->out, c, out);
    key_name(Dir::In, w->in, c, out);
    out += '}';
  } else if (const auto* g = std::get_if<Generator>(&f.v)) {
    out += g->name;
    out += '{';
    key_eterm(g->edges, c, out);
    out += '}';
  } else {
    const Box& b = std::get<Box>(f.v);
    out += '[';
    for (const Factor& inner : b.body.factors) {
      key_factor(inner, c, out);
      out += ' ';
    }
    out += ']';
    out += b.name;
  }
}

std::string factor_key(const Factor& f, const Classes& c) {
  std::string out;
  key_factor(f, c, out);
  return out;
}

void sort_rec(TensorExpr& t, const Classes& c) {
  for (Factor& f : t.factors)
    if (auto* b = std::get_if<Box>(&f.v)) sort_rec(b->body, c);
  std::stable_sort(t.factors.begin(), t.factors.end(),
                   [&](const Factor& a, const Factor& b) {
                     return factor_key(a, c) < factor_key(b, c);
                   });
}

constexpr long long kMaxArrangements = 40320;  // 8!

struct TieRange {
  std::vector<size_t> path;
  size_t start, len;
  std::vector<std::vector<size_t>> perms;
};

void find_ranges(const TensorExpr& t, const Classes& c, std::vector<size_t>& path,
                 std::vector<TieRange>& out) {
  std::vector<std::string> keys;
  keys.reserve(t.factors.size());
  for (const Factor& f : t.factors) keys.push_back(factor_key(f, c));
  for (size_t i = 0; i < keys.size();) {
    size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    if (j - i >= 2) {
      bool identical = true;
      for (size_t k = i + 1; k < j && identical; ++k)
        identical = t.factors[k] == t.factors[i];
      if (!identical) {
        TieRange r{path, i, j - i, {}};
        std::vector<size_t> idx(j - i);
        for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        do {
          r.perms.push_back(idx);
        } while (std::next_permutation(idx.begin(), idx.end()));
        out.push_back(std::move(r));
      }
    }
    i = j;
  }
  for (size_t i = 0; i < t.factors.size(); ++i) {
    if (const auto* b = std::get_if<Box>(&t.factors[i].v)) {
      path.push_back(i);
      find_ranges(b->body, c, path, out);
      path.pop_back();
    }
  }
}

void apply_perm(TensorExpr& root, const TieRange& r,
                const std::vector<size_t>& perm) {
  TensorExpr* prod = navigate(&root, r.path);
  std::vector<Factor> slice(prod->factors.begin() + r.start,
                            prod->factors.begin() + r.start + r.len);
  for (size_t k = 0; k < r.len; ++k)
    prod->factors[r.start + k] = slice[perm[k]];
}

// Assigns b1,b2,... / f1,f2,... in print order and prints.
std::string name_and_print(const TensorExpr& arranged, const Classes& c,
                           TensorExpr* out_tree) {
  std::map<EdgeName, EdgeName> emap;
  int bc = 0, fc = 0;
  auto fresh = [&](const char* prefix, int& counter) {
    std::string n;
    do {
      n = prefix + std::to_string(++counter);
    } while (c.kept.count(n));
    return n;
  };
  for (const Occurrence& o : occurrences(arranged)) {
    if (emap.count(o.name)) continue;
    if (c.bound.count(o.name))
      emap[o.name] = fresh("b", bc);
    else if (c.renameable.count(o.name))
      emap[o.name] = fresh("f", fc);
  }
  TensorExpr renamed = arranged;
  substitute_names(renamed, emap, {});
  std::string s = print(renamed);
  if (out_tree) *out_tree = std::move(renamed);
  return s;
}

std::string canonicalize(const TensorExpr& t, const std::set<EdgeName>& ren,
                         TensorExpr* out_tree) {
  TensorExpr c = clean(t);
  Classes cls = classify(c, ren);
  sort_rec(c, cls);

  std::vector<TieRange> ranges;
  std::vector<size_t> path;
  find_ranges(c, cls, path, ranges);
  // deepest products first so recorded paths stay valid while permuting
  std::stable_sort(ranges.begin(), ranges.end(),
                   [](const TieRange& a, const TieRange& b) {
                     return a.path.size() > b.path.size();
                   });

  long long total = 1;
  for (const TieRange& r : ranges) {
    total *= static_cast<long long>(r.perms.size());
    if (total > kMaxArrangements) break;
  }
  if (ranges.empty() || total > kMaxArrangements)
    return name_and_print(c, cls, out_tree);

  std::vector<size_t> digits(ranges.size(), 0);
  std::string best;
  TensorExpr best_tree;
  for (;;) {
    TensorExpr cand = c;
    for (size_t i = 0; i < ranges.size(); ++i)
      apply_perm(cand, ranges[i], ranges[i].perms[digits[i]]);
    TensorExpr tree;
    std::string s = name_and_print(cand, cls, out_tree ? &tree : nullptr);
    if (best.empty() || s < best) {
      best = std::move(s);
      if (out_tree) best_tree = std::move(tree);
    }
    size_t i = 0;
    for (; i < digits.size(); ++i) {
      if (++digits[i] < ranges[i].perms.size()) break;
      digits[i] = 0;
    }
    if (i == digits.size()) break;
  }
  if (out_tree) *out_tree = std::move(best_tree);
  return best;
}

// ---- joint canonicalization of an equation ----

// Bound names are side-local, so each side numbers its own b's. The
// renameable frees are the shared interface and take one f-assignment in
// combined print order, left side first.
std::string name_and_print_pair(const TensorExpr& l, const TensorExpr& r,
                                const Classes& cl, const Classes& cr) {
  std::map<EdgeName, EdgeName> shared;
  int fc = 0;
  auto fresh_f = [&]() {
    std::string n;
    do {
      n = "f" + std::to_string(++fc);
    } while (cl.kept.count(n) || cr.kept.count(n));
    return n;
  };
  auto side = [&](const TensorExpr& t, const Classes& c) {
    std::map<EdgeName, EdgeName> emap;
    int bc = 0;
    for (const Occurrence& o : occurrences(t)) {
      if (emap.count(o.name)) continue;
      if (c.bound.count(o.name)) {
        std::string n;
        do {
          n = "b" + std::to_string(++bc);
        } while (c.kept.count(n));
        emap[o.name] = n;
      } else if (c.renameable.count(o.name)) {
        if (!shared.count(o.name)) shared[o.name] = fresh_f();
        emap[o.name] = shared.at(o.name);
      }
    }
    TensorExpr renamed = t;
    substitute_names(renamed, emap, {});
    return print(renamed);
  };
  std::string sl = side(l, cl);
  std::string sr = side(r, cr);
  return sl + " = " + sr;
}

std::string canonicalize_pair(const TensorExpr& lhs, const TensorExpr& rhs,
                              const std::set<EdgeName>& ren) {
  TensorExpr l = clean(lhs), r = clean(rhs);
  Classes cl = classify(l, ren), cr = classify(r, ren);
  sort_rec(l, cl);
  sort_rec(r, cr);

  struct SideRange {
    int side;
    TieRange range;
  };
  std::vector<SideRange> ranges;
  std::vector<size_t> path;
  {
    std::vector<TieRange> tmp;
    find_ranges(l, cl, path, tmp);
    for (TieRange& t : tmp) ranges.push_back({0, std::move(t)});
    tmp.clear();
    find_ranges(r, cr, path, tmp);
    for (TieRange& t : tmp) ranges.push_back({1, std::move(t)});
  }
  std::stable_sort(ranges.begin(), ranges.end(),
                   [](const SideRange& a, const SideRange& b) {
                     return a.range.path.size() > b.range.path.size();
                   });

  long long total = 1;
  for (const SideRange& s : ranges) {
    total *= static_cast<long long>(s.range.perms.size());
    if (total > kMaxArrangements) break;
  }
  if (ranges.empty() || total > kMaxArrangements)
    return name_and_print_pair(l, r, cl, cr);

  std::vector<size_t> digits(ranges.size(), 0);
  std::string best;
  for (;;) {
    TensorExpr al = l, ar = r;
    for (size_t i = 0; i < ranges.size(); ++i)
      apply_perm(ranges[i].side == 0 ? al : ar, ranges[i].range,
                 ranges[i].range.perms[digits[i]]);
    std::string s = name_and_print_pair(al, ar, cl, cr);
    if (best.empty() || s < best) best = std::move(s);
    size_t i = 0;
    for (; i < digits.size(); ++i) {
      if (++digits[i] < ranges[i].range.perms.size()) break;
      digits[i] = 0;
    }
    if (i == digits.size()) break;
  }
  return best;
}

}  // namespace

TensorExpr clean(const TensorExpr& t) {
  TensorExpr c = t;
  drop_units(c);
  while (contract_one(c)) {
  }
  return c;
}

std::string canonical_string(const TensorExpr& t,
                             const std::set<EdgeName>& renameable_free) {
  return canonicalize(t, renameable_free, nullptr);
}

TensorExpr canonical_form(const TensorExpr& t,
                          const std::set<EdgeName>& renameable_free) {
  TensorExpr out;
  canonicalize(t, renameable_free, &out);
  return out;
}

bool equiv(const TensorExpr& a, const TensorExpr& b) {
  require_wellformed(a, "left term");
  require_wellformed(b, "right term");
  return canonical_string(a) == canonical_string(b);
}

bool equiv_mod(const TensorExpr& a, const TensorExpr& b,
               const std::set<EdgeName>& renameable_free) {
  require_wellformed(a, "left term");
  require_wellformed(b, "right term");
  return canonical_string(a, renameable_free) ==
         canonical_string(b, renameable_free);
}

std::string canonical_equation_string(
    const Equation& eq, const std::set<EdgeName>& renameable_free) {
  return canonicalize_pair(eq.lhs, eq.rhs, renameable_free);
}

}  // namespace bt
