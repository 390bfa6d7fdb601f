#include "bt/instantiate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "bt/normalize.hpp"
#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

namespace bt {

namespace {

std::set<EdgeName> free_names(const TensorExpr& t) {
  std::set<EdgeName> out;
  for (const auto& [name, use] : edge_uses(t))
    if (!(use.out && use.in)) out.insert(name);
  return out;
}

std::optional<BoxName> least_top_box(const TensorExpr& t) {
  std::optional<BoxName> best;
  for (const Factor& f : t.factors)
    if (const auto* b = std::get_if<Box>(&f.v))
      if (!best || b->name < *best) best = b->name;
  return best;
}

const TensorExpr* find_box_body(const TensorExpr& t, const BoxName& name) {
  for (const Factor& f : t.factors)
    if (const auto* b = std::get_if<Box>(&f.v)) {
      if (b->name == name) return &b->body;
      if (const TensorExpr* r = find_box_body(b->body, name)) return r;
    }
  return nullptr;
}

// Whether inner's box factor sits in outer's body. Marker nesting follows
// factor nesting, so against a top-level outer there is no third case: inner
// is either in there or fully independent of outer.
bool box_inside(const TensorExpr& t, const BoxName& outer,
                const BoxName& inner) {
  const TensorExpr* body = find_box_body(t, outer);
  if (!body) throw BtError("internal: lost box " + outer);
  auto names = box_factor_names(*body);
  return std::find(names.begin(), names.end(), inner) != names.end();
}

// ---- pinned steps ----

// An exp step with its fresh choices pinned, so it replays byte for byte
// after being moved to a different position in the sequence. Kills carry no
// choices and keep the maps empty.
struct PinnedOp {
  BoxOp op;
  std::map<EdgeName, EdgeName> epin;
  std::map<BoxName, BoxName> bpin;
};

// Every name any step of the normalization has ever allocated, plus the
// source's own. New choices draw against the whole pool, so a fresh name is
// never a recycled one and stays fresh however far its step later moves.
struct Hist {
  std::set<EdgeName> edges;
  std::set<BoxName> boxes;
};

// Runs one step. Pins beyond what the step actually consults at `t` are
// ignored, so the returned maps list exactly the consulted names; stale
// entries captured in a world further right do not leak into them. With
// `hist` the unpinned choices avoid the pool and the step's choices join it.
TensorExpr run_pinned(const TensorExpr& t, const PinnedOp& p,
                      std::map<EdgeName, EdgeName>* emap,
                      std::map<BoxName, BoxName>* bmap, Hist* hist = nullptr) {
  if (p.op.kind == OpKind::Kill) {
    if (emap) emap->clear();
    if (bmap) bmap->clear();
    return op_kill(t, p.op.box);
  }
  if (p.op.kind != OpKind::Exp)
    throw BtError("instantiations use exp and kill only");
  FreshNames fr(t);
  if (hist) {
    for (const EdgeName& n : hist->edges) fr.reserve_edge(n);
    for (const BoxName& n : hist->boxes) fr.reserve_box(n);
  }
  if (!p.epin.empty() || !p.bpin.empty()) {
    FreshNames probe(t);
    op_exp(t, p.op.box, probe);
    for (const auto& [from, to] : p.epin)
      if (probe.edge_map().count(from)) fr.override_edge(from, to);
    for (const auto& [from, to] : p.bpin)
      if (probe.box_map().count(from)) fr.override_box(from, to);
  }
  TensorExpr out = op_exp(t, p.op.box, fr);
  if (hist) {
    for (const auto& [from, to] : fr.edge_map()) hist->edges.insert(to);
    for (const auto& [from, to] : fr.box_map()) hist->boxes.insert(to);
  }
  if (emap) *emap = fr.edge_map();
  if (bmap) *bmap = fr.box_map();
  return out;
}

TensorExpr run_pinned(const TensorExpr& t, const std::vector<PinnedOp>& seq) {
  TensorExpr out = t;
  for (const PinnedOp& p : seq) out = run_pinned(out, p, nullptr, nullptr);
  return out;
}

// Moves the round's step at position i+1 one slot left, keeping the final
// term of the whole sequence byte for byte. `before` is the state the pair
// currently applies to. Crossing a kill absorbs steps under the dying box;
// crossing an exp spawns a residual step against the fresh copy.
void commute_left(std::vector<PinnedOp>& seq, size_t i,
                  const TensorExpr& before, Hist& hist) {
  PinnedOp x = seq[i], a = seq[i + 1];
  bool inside = box_inside(before, a.op.box, x.op.box);
  if (a.op.kind == OpKind::Kill) {
    if (inside) {
      // everything x makes lives under a's box and dies with it
      seq[i] = a;
      seq.erase(seq.begin() + i + 1);
      return;
    }
    // x never looks at a's box and its choices are pinned already
    seq[i] = a;
    seq[i + 1] = std::move(x);
    return;
  }
  // a is an expansion; replay the pair to read off both sets of choices
  PinnedOp x2{x.op, {}, {}};
  PinnedOp a2{a.op, {}, {}};
  TensorExpr mid = run_pinned(before, x, &x2.epin, &x2.bpin);
  run_pinned(mid, a, &a2.epin, &a2.bpin);
  std::map<EdgeName, EdgeName> se = a2.epin;
  std::map<BoxName, BoxName> sb = a2.bpin;
  if (!inside) {
    seq[i] = std::move(a2);
    seq[i + 1] = std::move(x2);
    return;
  }
  if (x.op.kind == OpKind::Exp) {
    // the expansion copied x's products; the copy must redo x with the
    // copied names so both orders agree byte for byte
    PinnedOp spawn{BoxOp{OpKind::Exp, sb.at(x.op.box)}, {}, {}};
    for (const auto& [from, to] : x2.epin) spawn.epin[se.at(from)] = se.at(to);
    for (const auto& [from, to] : x2.bpin) spawn.bpin[sb.at(from)] = sb.at(to);
    seq[i] = std::move(a2);
    seq[i + 1] = std::move(x2);
    seq.insert(seq.begin() + i + 2, std::move(spawn));
    return;
  }
  // x kills a box under a's; expanding first revives it in the copy, so the
  // copy's box dies by a spawned kill. The revived subtree is material the
  // captured choices never saw; pin what the supply picks for it now.
  std::map<EdgeName, EdgeName> fe;
  std::map<BoxName, BoxName> fb;
  run_pinned(before, a2, &fe, &fb, &hist);
  a2.epin = std::move(fe);
  a2.bpin = std::move(fb);
  PinnedOp spawn{BoxOp{OpKind::Kill, a2.bpin.at(x.op.box)}, {}, {}};
  seq[i] = std::move(a2);
  seq[i + 1] = std::move(x);
  seq.insert(seq.begin() + i + 2, std::move(spawn));
}

// The steps acting on this round's box: every step named a up to and
// including its first kill. Later steps with the same name target a reborn
// name and belong to a later round.
std::vector<size_t> round_ops(const std::vector<PinnedOp>& seq,
                              const BoxName& a) {
  std::vector<size_t> out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].op.box != a) continue;
    out.push_back(i);
    if (seq[i].op.kind == OpKind::Kill) break;
  }
  return out;
}

// ---- bounded enumeration ----

void enum_rec(const TensorExpr& cur, int bound, Instantiation& trail,
              const std::set<EdgeName>& protect,
              std::map<std::string, TensorExpr>* inst,
              std::vector<Instantiation>* seqs) {
  std::optional<BoxName> a = least_top_box(cur);
  if (!a) {
    if (!is_concrete(cur))
      throw BtError("internal: markers left without their boxes");
    if (seqs) seqs->push_back(trail);
    if (inst) {
      std::set<EdgeName> ren;
      for (const EdgeName& f : free_names(cur))
        if (!protect.count(f)) ren.insert(f);
      std::string key = canonical_string(cur, ren);
      if (!inst->count(key)) inst->emplace(key, canonical_form(cur, ren));
    }
    return;
  }
  size_t mark = trail.size();
  TensorExpr t = cur;
  for (int k = 0; k <= bound; ++k) {
    if (k > 0) t = apply(t, BoxOp{OpKind::Exp, *a});
    trail.resize(mark);
    for (int j = 0; j < k; ++j) trail.push_back(BoxOp{OpKind::Exp, *a});
    trail.push_back(BoxOp{OpKind::Kill, *a});
    enum_rec(apply(t, BoxOp{OpKind::Kill, *a}), bound, trail, protect, inst,
             seqs);
  }
  trail.resize(mark);
}

void enum_rec_eq(const Equation& cur, int bound, Instantiation& trail,
                 const std::set<EdgeName>& protect,
                 std::map<std::string, Equation>* inst,
                 std::vector<Instantiation>* seqs) {
  std::optional<BoxName> a = least_top_box(cur.lhs);
  if (!a) {
    if (!is_concrete(cur.lhs) || !is_concrete(cur.rhs))
      throw BtError("equation sides disagree about their boxes");
    if (seqs) seqs->push_back(trail);
    if (inst) {
      std::set<EdgeName> ren;
      for (const EdgeName& f : free_names(cur.lhs))
        if (!protect.count(f)) ren.insert(f);
      for (const EdgeName& f : free_names(cur.rhs))
        if (!protect.count(f)) ren.insert(f);
      std::string key = canonical_equation_string(cur, ren);
      if (!inst->count(key)) inst->emplace(key, cur);
    }
    return;
  }
  size_t mark = trail.size();
  Equation t = cur;
  for (int k = 0; k <= bound; ++k) {
    if (k > 0) t = apply(t, BoxOp{OpKind::Exp, *a});
    trail.resize(mark);
    for (int j = 0; j < k; ++j) trail.push_back(BoxOp{OpKind::Exp, *a});
    trail.push_back(BoxOp{OpKind::Kill, *a});
    enum_rec_eq(apply(t, BoxOp{OpKind::Kill, *a}), bound, trail, protect, inst,
                seqs);
  }
  trail.resize(mark);
}

// ---- copy elimination ----

// Lockstep replay: the copy-bearing run drives a copy-free shadow. phi sends
// each live box of the driven world to the shadow box standing in for it,
// live counts how many preimages a shadow box still has. A copy only extends
// phi; a kill reaches the shadow once the last preimage dies.
Instantiation eliminate_core(
    const std::vector<BoxOp>& ops, const std::set<BoxName>& initial,
    const std::function<std::map<BoxName, BoxName>(const BoxOp&)>& driven,
    const std::function<std::map<BoxName, BoxName>(const BoxOp&)>& shadow) {
  std::map<BoxName, BoxName> phi;
  std::map<BoxName, int> live;
  for (const BoxName& b : initial) {
    phi[b] = b;
    live[b] = 1;
  }
  Instantiation out;
  for (const BoxOp& op : ops) {
    if (!phi.count(op.box)) {
      driven(op);  // throws UnknownBox with the offending name
      throw BtError("internal: survived a step on an unknown box");
    }
    BoxName w = phi.at(op.box);
    switch (op.kind) {
      case OpKind::Exp: {
        std::map<BoxName, BoxName> bm1 = driven(op);
        std::map<BoxName, BoxName> bm = shadow(BoxOp{OpKind::Exp, w});
        out.push_back(BoxOp{OpKind::Exp, w});
        for (const auto& [b, c] : bm1) {
          phi[c] = bm.at(phi.at(b));
          live[phi.at(c)] += 1;
        }
        break;
      }
      case OpKind::Copy: {
        std::map<BoxName, BoxName> bm1 = driven(op);
        for (const auto& [b, c] : bm1) {
          phi[c] = phi.at(b);
          live[phi.at(c)] += 1;
        }
        break;
      }
      case OpKind::Kill: {
        driven(op);
        if (--live.at(w) == 0) {
          shadow(BoxOp{OpKind::Kill, w});
          out.push_back(BoxOp{OpKind::Kill, w});
        }
        break;
      }
      default:
        throw BtError("copy elimination handles exp, kill and copy only");
    }
  }
  return out;
}

}  // namespace

bool is_concrete(const TensorExpr& t) {
  for (const Factor& f : t.factors) {
    if (std::holds_alternative<Box>(f.v)) return false;
    if (const auto* g = std::get_if<Generator>(&f.v))
      for (const EdgeItem& it : g->edges)
        if (std::holds_alternative<Group>(it.v)) return false;
  }
  return true;
}

TensorExpr apply_instantiation(const Instantiation& i, const TensorExpr& g) {
  TensorExpr t = g;
  for (size_t k = 0; k < i.size(); ++k) {
    if (i[k].kind != OpKind::Exp && i[k].kind != OpKind::Kill)
      throw BtError("instantiations use exp and kill only");
    try {
      t = apply(t, i[k]);
    } catch (const UnknownBox& e) {
      throw UnknownBox("step " + std::to_string(k) + ": " + e.what());
    }
  }
  return t;
}

Equation apply_instantiation(const Instantiation& i, const Equation& g) {
  Equation t = g;
  for (size_t k = 0; k < i.size(); ++k) {
    if (i[k].kind != OpKind::Exp && i[k].kind != OpKind::Kill)
      throw BtError("instantiations use exp and kill only");
    try {
      t = apply(t, i[k]);
    } catch (const UnknownBox& e) {
      throw UnknownBox("step " + std::to_string(k) + ": " + e.what());
    }
  }
  return t;
}

Instantiation normal_form(const Instantiation& i, const TensorExpr& g) {
  require_wellformed(g, "instantiation source");
  if (!is_concrete(apply_instantiation(i, g)))
    throw IncompleteInstantiation("instantiation leaves boxes behind");

  // Replay the input against a twin world whose supply never recycles a
  // name: every choice is pinned and drawn against the pool of everything
  // ever allocated, and each step's target is carried over to its twin box.
  // Reordering then cannot bring a pinned name back into a world still
  // holding its earlier user; the closing replay undoes the renaming.
  Hist hist;
  collect_edge_names(g, hist.edges);
  collect_box_names(g, hist.boxes);
  std::map<BoxName, BoxName> tau;
  for (const BoxName& b : hist.boxes) tau[b] = b;
  std::vector<PinnedOp> seq;
  seq.reserve(i.size());
  TensorExpr w = g, r = g;
  for (const BoxOp& op : i) {
    auto target = tau.find(op.box);
    if (target == tau.end())
      throw BtError("internal: lost track of box " + op.box);
    PinnedOp pr{BoxOp{op.kind, target->second}, {}, {}};
    std::map<BoxName, BoxName> wb;
    std::map<EdgeName, EdgeName> re;
    std::map<BoxName, BoxName> rb;
    w = run_pinned(w, PinnedOp{op, {}, {}}, nullptr, &wb);
    r = run_pinned(r, pr, &re, &rb, &hist);
    for (const auto& [b, c] : wb) tau[c] = rb.at(tau.at(b));
    pr.epin = std::move(re);
    pr.bpin = std::move(rb);
    seq.push_back(std::move(pr));
  }
  TensorExpr expect = r;

  // Alongside the twin runs a world with plain freshness; rho carries each
  // twin box to its plain stand-in. Every emitted step is the plain
  // translation of the twin step just committed.
  Instantiation out;
  out.reserve(i.size());
  std::map<BoxName, BoxName> rho;
  auto rho_of = [&rho](const BoxName& b) {
    auto it = rho.find(b);
    return it == rho.end() ? b : it->second;
  };
  std::vector<PinnedOp> done;
  TensorExpr t = g, v = g;
  int guard = 0;
  for (;;) {
    // the round works the box that comes first under its plain name; the
    // twin's own numbering runs by allocation age and may rank differently
    std::optional<BoxName> a;
    for (const Factor& f : t.factors)
      if (const auto* b = std::get_if<Box>(&f.v))
        if (!a || rho_of(b->name) < rho_of(*a)) a = b->name;
    if (!a) break;
    if (++guard > 10000)
      throw BtError("internal: the rewriting does not settle");
    size_t want = 0;
    for (;;) {
      std::vector<size_t> pos = round_ops(seq, *a);
      if (want == pos.size()) break;
      size_t p = pos[want];
      while (p > want) {
        TensorExpr before = t;
        for (size_t k = 0; k + 1 < p; ++k)
          before = run_pinned(before, seq[k], nullptr, nullptr);
        commute_left(seq, p - 1, before, hist);
        --p;
      }
      ++want;
    }
    if (want == 0 || seq[want - 1].op.kind != OpKind::Kill)
      throw BtError("internal: box " + *a + " never dies");
    for (size_t k = 0; k + 1 < want; ++k)
      if (seq[k].op.kind != OpKind::Exp)
        throw BtError("internal: round prefix out of shape");
    for (size_t k = 0; k < want; ++k) {
      std::map<BoxName, BoxName> bt2, bv;
      t = run_pinned(t, seq[k], nullptr, &bt2);
      PinnedOp pv{BoxOp{seq[k].op.kind, rho_of(seq[k].op.box)}, {}, {}};
      v = run_pinned(v, pv, nullptr, &bv);
      for (const auto& [b, c] : bt2) rho[c] = bv.at(rho_of(b));
      out.push_back(pv.op);
      done.push_back(seq[k]);
    }
    seq.erase(seq.begin(), seq.begin() + want);
    TensorExpr replay = run_pinned(run_pinned(g, done), seq);
    if (print(replay) != print(expect))
      throw BtError("internal: the rewriting changed the instance");
  }
  if (!seq.empty()) throw BtError("internal: steps left after the last box");
  return out;
}

std::vector<TensorExpr> enumerate_instances(const TensorExpr& g,
                                            InstanceBound bound) {
  require_wellformed(g, "instantiation source");
  if (bound.n < 0) throw BtError("instance bound must be >= 0");
  std::map<std::string, TensorExpr> inst;
  Instantiation trail;
  enum_rec(g, bound.n, trail, free_names(g), &inst, nullptr);
  std::vector<TensorExpr> out;
  out.reserve(inst.size());
  for (auto& [key, term] : inst) out.push_back(std::move(term));
  return out;
}

std::vector<Instantiation> enumerate_instantiations(const TensorExpr& g,
                                                    InstanceBound bound) {
  require_wellformed(g, "instantiation source");
  if (bound.n < 0) throw BtError("instance bound must be >= 0");
  std::vector<Instantiation> seqs;
  Instantiation trail;
  enum_rec(g, bound.n, trail, {}, nullptr, &seqs);
  return seqs;
}

std::vector<Equation> instantiate_equation(const Equation& eq,
                                           InstanceBound bound) {
  require_wellformed(eq.lhs, "left side");
  require_wellformed(eq.rhs, "right side");
  if (bound.n < 0) throw BtError("instance bound must be >= 0");
  std::set<EdgeName> protect = free_names(eq.lhs);
  for (const EdgeName& f : free_names(eq.rhs)) protect.insert(f);
  std::map<std::string, Equation> inst;
  Instantiation trail;
  enum_rec_eq(eq, bound.n, trail, protect, &inst, nullptr);
  std::vector<Equation> out;
  out.reserve(inst.size());
  for (auto& [key, e] : inst) out.push_back(std::move(e));
  return out;
}

std::vector<Instantiation> enumerate_equation_instantiations(
    const Equation& eq, InstanceBound bound) {
  require_wellformed(eq.lhs, "left side");
  require_wellformed(eq.rhs, "right side");
  if (bound.n < 0) throw BtError("instance bound must be >= 0");
  std::vector<Instantiation> seqs;
  Instantiation trail;
  enum_rec_eq(eq, bound.n, trail, {}, nullptr, &seqs);
  return seqs;
}

std::string instance_key(const TensorExpr& inst, const TensorExpr& original) {
  std::set<EdgeName> keep = free_names(original);
  std::set<EdgeName> ren;
  for (const EdgeName& f : free_names(inst))
    if (!keep.count(f)) ren.insert(f);
  return canonical_string(inst, ren);
}

std::string instance_key(const Equation& inst, const Equation& original) {
  std::set<EdgeName> keep = free_names(original.lhs);
  for (const EdgeName& f : free_names(original.rhs)) keep.insert(f);
  std::set<EdgeName> ren;
  for (const EdgeName& f : free_names(inst.lhs))
    if (!keep.count(f)) ren.insert(f);
  for (const EdgeName& f : free_names(inst.rhs))
    if (!keep.count(f)) ren.insert(f);
  return canonical_equation_string(inst, ren);
}

Instantiation eliminate_copies(const TensorExpr& g,
                               const std::vector<BoxOp>& ops) {
  require_wellformed(g, "instantiation source");
  TensorExpr driven = g, shadow = g;
  auto step = [](TensorExpr& t, const BoxOp& op) {
    FreshNames fr(t);
    switch (op.kind) {
      case OpKind::Exp:
        t = op_exp(t, op.box, fr);
        break;
      case OpKind::Copy:
        t = op_copy(t, op.box, fr);
        break;
      case OpKind::Kill:
        t = op_kill(t, op.box);
        break;
      default:
        throw BtError("copy elimination handles exp, kill and copy only");
    }
    return fr.box_map();
  };
  std::set<BoxName> initial;
  collect_box_names(g, initial);
  return eliminate_core(
      ops, initial, [&](const BoxOp& op) { return step(driven, op); },
      [&](const BoxOp& op) { return step(shadow, op); });
}

Instantiation eliminate_copies(const Equation& eq,
                               const std::vector<BoxOp>& ops) {
  require_wellformed(eq.lhs, "left side");
  require_wellformed(eq.rhs, "right side");
  Equation driven = eq, shadow = eq;
  auto step = [](Equation& e, const BoxOp& op) {
    FreshNames fr(e.lhs, e.rhs);
    switch (op.kind) {
      case OpKind::Exp:
        e = Equation{op_exp(e.lhs, op.box, fr), op_exp(e.rhs, op.box, fr)};
        break;
      case OpKind::Copy:
        e = Equation{op_copy(e.lhs, op.box, fr), op_copy(e.rhs, op.box, fr)};
        break;
      case OpKind::Kill:
        e = Equation{op_kill(e.lhs, op.box), op_kill(e.rhs, op.box)};
        break;
      default:
        throw BtError("copy elimination handles exp, kill and copy only");
    }
    return fr.box_map();
  };
  std::set<BoxName> initial;
  collect_box_names(eq.lhs, initial);
  collect_box_names(eq.rhs, initial);
  return eliminate_core(
      ops, initial, [&](const BoxOp& op) { return step(driven, op); },
      [&](const BoxOp& op) { return step(shadow, op); });
}

}  // namespace bt
