#include "bt/calculus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bt/normalize.hpp"
#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

namespace bt {

namespace {

// ---------------------------------------------------------------------------
// interface extraction

// Context of an edge occurrence: group markers innermost first, then the
// enclosing boxes innermost first. Wire endpoints carry the box chain alone.
void ctx_items(const EdgeTerm& items, const std::vector<BoxName>& nest,
               std::vector<BoxName>& ectx,
               std::map<EdgeName, std::vector<BoxName>>& ctx) {
  for (const EdgeItem& it : items) {
    if (const auto* e = std::get_if<DirectedEdge>(&it.v)) {
      if (!ctx.count(e->name)) {
        std::vector<BoxName> c(ectx.rbegin(), ectx.rend());
        c.insert(c.end(), nest.rbegin(), nest.rend());
        ctx.emplace(e->name, std::move(c));
      }
    } else {
      const Group& g = std::get<Group>(it.v);
      ectx.push_back(g.box);
      ctx_items(g.body, nest, ectx, ctx);
      ectx.pop_back();
    }
  }
}

void ctx_walk(const TensorExpr& t, std::vector<BoxName>& nest,
              std::map<EdgeName, std::vector<BoxName>>& ctx) {
  for (const Factor& f : t.factors) {
    if (const auto* g = std::get_if<Generator>(&f.v)) {
      std::vector<BoxName> ectx;
      ctx_items(g->edges, nest, ectx, ctx);
    } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
      std::vector<BoxName> c(nest.rbegin(), nest.rend());
      if (!ctx.count(w->out)) ctx.emplace(w->out, c);
      if (!ctx.count(w->in)) ctx.emplace(w->in, c);
    } else if (const auto* b = std::get_if<Box>(&f.v)) {
      nest.push_back(b->name);
      ctx_walk(b->body, nest, ctx);
      nest.pop_back();
    }
  }
}

void box_nests(const TensorExpr& t, std::vector<BoxName>& nest,
               std::map<BoxName, std::vector<BoxName>>& out) {
  for (const Factor& f : t.factors)
    if (const auto* b = std::get_if<Box>(&f.v)) {
      out.emplace(b->name, nest);
      nest.push_back(b->name);
      box_nests(b->body, nest, out);
      nest.pop_back();
    }
}

std::map<EdgeName, Dir> free_dirs(const TensorExpr& t) {
  std::map<EdgeName, Dir> out;
  for (const auto& [name, use] : edge_uses(t))
    if (!(use.out && use.in))
      out.emplace(name, use.out ? Dir::Out : Dir::In);
  return out;
}

std::set<EdgeName> free_edges(const TensorExpr& t) {
  std::set<EdgeName> out;
  for (const auto& [name, use] : edge_uses(t))
    if (!(use.out && use.in)) out.insert(name);
  return out;
}

std::set<EdgeName> free_edges(const Equation& eq) {
  std::set<EdgeName> out = free_edges(eq.lhs);
  std::set<EdgeName> r = free_edges(eq.rhs);
  out.insert(r.begin(), r.end());
  return out;
}

// New frees relative to a base equation: the ones an expansion minted.
std::set<EdgeName> fresh_frees(const Equation& eq, const Equation& base) {
  std::set<EdgeName> out = free_edges(eq);
  for (const EdgeName& n : free_edges(base)) out.erase(n);
  return out;
}

}  // namespace

CompatReport check_compatible(const TensorExpr& lhs, const TensorExpr& rhs) {
  std::map<EdgeName, Dir> fl = free_dirs(lhs), fr = free_dirs(rhs);
  for (const auto& [name, dir] : fl) {
    auto it = fr.find(name);
    if (it == fr.end())
      return {"free edge '" + name + "' occurs only in the left side"};
    if (it->second != dir)
      return {"free edge '" + name + "' changes direction between the sides"};
  }
  for (const auto& [name, dir] : fr)
    if (!fl.count(name))
      return {"free edge '" + name + "' occurs only in the right side"};

  std::map<BoxName, std::vector<BoxName>> bl, br;
  std::vector<BoxName> nest;
  box_nests(lhs, nest, bl);
  box_nests(rhs, nest, br);
  for (const auto& [name, chain] : bl) {
    auto it = br.find(name);
    if (it == br.end())
      return {"box '" + name + "' occurs only in the left side"};
    if (it->second != chain)
      return {"nesting mismatch for box '" + name + "'"};
  }
  for (const auto& [name, chain] : br)
    if (!bl.count(name))
      return {"box '" + name + "' occurs only in the right side"};

  std::map<EdgeName, std::vector<BoxName>> cl, cr;
  ctx_walk(lhs, nest, cl);
  ctx_walk(rhs, nest, cr);
  for (const auto& [name, dir] : fl)
    if (cl.at(name) != cr.at(name))
      return {"context mismatch for free edge '" + name + "'"};
  return {};
}

Equation derive_rename(const Equation& eq, const EdgeName& from,
                       const EdgeName& to) {
  std::set<EdgeName> l, r;
  collect_edge_names(eq.lhs, l);
  collect_edge_names(eq.rhs, r);
  if (!l.count(from) && !r.count(from))
    throw NotFound("edge '" + from + "' does not occur in the equation");
  Equation out = eq;
  if (l.count(from)) out.lhs = rename_edge(eq.lhs, from, to);
  if (r.count(from)) out.rhs = rename_edge(eq.rhs, from, to);
  return out;
}

Equation derive_box_rename(const Equation& eq, const BoxName& from,
                           const BoxName& to) {
  std::set<BoxName> l, r;
  collect_box_names(eq.lhs, l);
  collect_box_names(eq.rhs, r);
  if (!l.count(from) && !r.count(from))
    throw NotFound("box '" + from + "' does not occur in the equation");
  Equation out = eq;
  if (l.count(from)) out.lhs = rename_box(eq.lhs, from, to);
  if (r.count(from)) out.rhs = rename_box(eq.rhs, from, to);
  return out;
}

// ---------------------------------------------------------------------------
// proof parsing

namespace {

const Token& expect_kw(TokenStream& ts, const std::string& w) {
  if (!ts.at_ident(w)) ts.fail("'" + w + "'");
  return ts.next();
}

bool at_spec_kw(const TokenStream& ts) {
  if (!ts.at(Tok::Ident)) return false;
  if (ts.peek(1).kind == Tok::LBrace) return false;  // a generator, not a kw
  const std::string& t = ts.peek().text;
  return t == "rename" || t == "boxrename" || t == "exp" || t == "kill" ||
         t == "copy" || t == "drop" || t == "weaken";
}

Justification parse_just(TokenStream& ts) {
  Justification j;
  if (ts.at_ident("equiv")) {
    ts.next();
    j.kind = Justification::Kind::Equiv;
    j.ref = ts.expect(Tok::Ident, "a step reference").text;
  } else if (ts.at_ident("axiom")) {
    ts.next();
    j.kind = Justification::Kind::Inst;
    j.ref = ts.expect(Tok::Ident, "an axiom name").text;
    while (at_spec_kw(ts)) {
      std::string kw = ts.next().text;
      SpecAction a;
      if (kw == "rename" || kw == "boxrename") {
        a.kind = kw == "rename" ? SpecAction::Kind::RenameEdge
                                : SpecAction::Kind::RenameBox;
        a.from = ts.expect(Tok::Ident, "a name").text;
        ts.expect(Tok::Minus, "'->'");
        ts.expect(Tok::Rangle, "'->'");
        a.to = ts.expect(Tok::Ident, "a name").text;
      } else if (kw == "weaken") {
        a.kind = SpecAction::Kind::Weaken;
        a.box = ts.expect(Tok::Ident, "a box name").text;
        a.with = parse_tensor(ts);
      } else {
        a.kind = SpecAction::Kind::Op;
        OpKind k = kw == "exp"    ? OpKind::Exp
                   : kw == "kill" ? OpKind::Kill
                   : kw == "copy" ? OpKind::Copy
                                  : OpKind::Drop;
        a.op = BoxOp{k, ts.expect(Tok::Ident, "a box name").text};
      }
      j.specs.push_back(std::move(a));
    }
  } else if (ts.at_ident("prod")) {
    ts.next();
    j.kind = Justification::Kind::Prod;
    j.ref = ts.expect(Tok::Ident, "a step reference").text;
    expect_kw(ts, "with");
    j.with = parse_tensor(ts);
  } else if (ts.at_ident("box")) {
    ts.next();
    j.kind = Justification::Kind::BoxIntro;
    j.ref = ts.expect(Tok::Ident, "a step reference").text;
    expect_kw(ts, "in");
    j.box = ts.expect(Tok::Ident, "a box name").text;
  } else if (ts.at_ident("sym")) {
    ts.next();
    j.kind = Justification::Kind::Sym;
    j.ref = ts.expect(Tok::Ident, "a step reference").text;
  } else if (ts.at_ident("trans")) {
    ts.next();
    j.kind = Justification::Kind::Trans;
    j.ref = ts.expect(Tok::Ident, "a step reference").text;
    j.ref2 = ts.expect(Tok::Ident, "a step reference").text;
  } else if (ts.at_ident("hyp")) {
    ts.next();
    j.kind = Justification::Kind::Hyp;
    j.ref = ts.expect(Tok::Ident, "a hypothesis name").text;
  } else {
    ts.fail("a justification");
  }
  return j;
}

ProofStep parse_step_stmt(TokenStream& ts, std::set<std::string>& ids) {
  expect_kw(ts, "step");
  Token id = ts.expect(Tok::Ident, "a step id");
  if (id.text == "ih" || !ids.insert(id.text).second)
    throw ParseError(id.offset, id.line, id.col, "a fresh step id",
                     "'" + id.text + "'");
  ts.expect(Tok::Colon, "':'");
  ProofStep st;
  st.id = id.text;
  st.claim.lhs = parse_tensor(ts);
  ts.expect(Tok::Eq, "'='");
  st.claim.rhs = parse_tensor(ts);
  expect_kw(ts, "by");
  st.just = parse_just(ts);
  return st;
}

InductionBlock parse_block(TokenStream& ts, std::set<std::string>& ids) {
  expect_kw(ts, "induction");
  InductionBlock blk;
  blk.box = ts.expect(Tok::Ident, "a box name").text;
  expect_kw(ts, "on");
  expect_kw(ts, "goal");
  expect_kw(ts, "base");
  ts.expect(Tok::LBrace, "'{'");
  while (!ts.at(Tok::RBrace)) blk.base.push_back(parse_step_stmt(ts, ids));
  ts.next();
  expect_kw(ts, "step");
  ts.expect(Tok::LBrace, "'{'");
  while (!ts.at(Tok::RBrace)) blk.step.push_back(parse_step_stmt(ts, ids));
  ts.next();
  return blk;
}

}  // namespace

ProofScript parse_proof(const std::string& src) {
  TokenStream ts(src);
  ProofScript out;
  std::set<std::string> names;
  while (!ts.at(Tok::End)) {
    expect_kw(ts, "theorem");
    Token name = ts.expect(Tok::Ident, "a theorem name");
    if (!names.insert(name.text).second)
      throw ParseError(name.offset, name.line, name.col,
                       "a fresh theorem name", "'" + name.text + "'");
    TheoremDecl th;
    th.name = name.text;
    ts.expect(Tok::Colon, "':'");
    th.claim.lhs = parse_tensor(ts);
    ts.expect(Tok::Eq, "'='");
    th.claim.rhs = parse_tensor(ts);
    expect_kw(ts, "proof");
    std::set<std::string> ids;
    while (!ts.at_ident("qed")) {
      if (ts.at_ident("step"))
        th.items.push_back(ProofItem{parse_step_stmt(ts, ids)});
      else if (ts.at_ident("induction"))
        th.items.push_back(ProofItem{parse_block(ts, ids)});
      else
        ts.fail("'step', 'induction' or 'qed'");
    }
    ts.next();
    out.theorems.push_back(std::move(th));
  }
  return out;
}

// ---------------------------------------------------------------------------
// checking

namespace {

struct Checker {
  const Theory& thy;
  std::vector<std::pair<std::string, Equation>> lemmas;
  std::set<std::string> rejected;
  std::map<std::string, Equation> steps;
  const std::set<BoxName>* fixed = nullptr;
  const Equation* hyp = nullptr;

  void validate_claim(const Equation& eq) const {
    require_wellformed(eq.lhs, "left side");
    require_wellformed(eq.rhs, "right side");
    check_arities(thy, eq.lhs);
    check_arities(thy, eq.rhs);
    CompatReport cr = check_compatible(eq.lhs, eq.rhs);
    if (!cr.ok())
      throw IllFormed("the sides are not compatible: " + cr.mismatch);
  }

  // Every rule must land on a well-formed, arity-clean, compatible equation.
  void require_result(const Equation& eq, const std::string& what) const {
    try {
      require_wellformed(eq.lhs, what);
      require_wellformed(eq.rhs, what);
      check_arities(thy, eq.lhs);
      check_arities(thy, eq.rhs);
    } catch (const BtError& e) {
      throw IllFormedResult(e.what());
    }
    CompatReport cr = check_compatible(eq.lhs, eq.rhs);
    if (!cr.ok()) throw IllFormedResult(what + ": " + cr.mismatch);
  }

  const Equation& resolve_axiomlike(const std::string& ref) const {
    if (const Equation* ax = thy.find_axiom(ref)) return *ax;
    for (const auto& [name, eq] : lemmas)
      if (name == ref) return eq;
    if (rejected.count(ref))
      throw UnknownAxiom("theorem '" + ref + "' was rejected");
    if (auto it = steps.find(ref); it != steps.end()) return it->second;
    throw UnknownAxiom("unknown axiom '" + ref + "'");
  }

  const Equation& resolve_eqref(const std::string& ref) const {
    if (auto it = steps.find(ref); it != steps.end()) return it->second;
    if (const Equation* ax = thy.find_axiom(ref)) return *ax;
    for (const auto& [name, eq] : lemmas)
      if (name == ref) return eq;
    if (rejected.count(ref))
      throw UnknownStep("theorem '" + ref + "' was rejected");
    throw UnknownStep("unknown step '" + ref + "'");
  }

  Equation specialize(Equation eq, const std::vector<SpecAction>& specs) const {
    for (const SpecAction& a : specs) {
      switch (a.kind) {
        case SpecAction::Kind::RenameEdge:
          eq = derive_rename(eq, a.from, a.to);
          break;
        case SpecAction::Kind::RenameBox:
          eq = derive_box_rename(eq, a.from, a.to);
          break;
        case SpecAction::Kind::Op:
          if (fixed && fixed->count(a.op.box))
            throw FixedBoxViolation("'" + a.op.box +
                                    "' is fixed in this induction step");
          eq = apply(eq, a.op);
          break;
        case SpecAction::Kind::Weaken:
          eq = Equation{weaken(eq.lhs, a.box, a.with),
                        weaken(eq.rhs, a.box, a.with)};
          break;
      }
      require_result(eq, "specialization result");
    }
    return eq;
  }

  Equation conclusion(const Justification& j) const {
    switch (j.kind) {
      case Justification::Kind::Equiv:
        return resolve_eqref(j.ref);
      case Justification::Kind::Inst:
        return specialize(resolve_axiomlike(j.ref), j.specs);
      case Justification::Kind::Prod: {
        Equation eq = resolve_eqref(j.ref);
        for (const Factor& f : j.with.factors) {
          eq.lhs.factors.push_back(f);
          eq.rhs.factors.push_back(f);
        }
        require_result(eq, "product");
        return eq;
      }
      case Justification::Kind::BoxIntro: {
        Equation p = resolve_eqref(j.ref);
        Equation eq{TensorExpr{{Factor{Box{j.box, p.lhs}}}},
                    TensorExpr{{Factor{Box{j.box, p.rhs}}}}};
        require_result(eq, "box introduction");
        return eq;
      }
      case Justification::Kind::Sym: {
        Equation p = resolve_eqref(j.ref);
        return {p.rhs, p.lhs};
      }
      case Justification::Kind::Trans: {
        Equation a = resolve_eqref(j.ref);
        Equation b = resolve_eqref(j.ref2);
        if (!equiv(a.rhs, b.lhs))
          throw ClaimMismatch("the middle terms differ");
        return {a.lhs, b.rhs};
      }
      default:
        throw UnknownStep("unknown justification");
    }
  }

  StepVerdict check_step(const ProofStep& st) {
    StepVerdict v{st.id, true, ""};
    try {
      validate_claim(st.claim);
      if (st.just.kind == Justification::Kind::Hyp) {
        if (st.just.ref != "ih")
          throw UnknownStep("unknown hypothesis '" + st.just.ref + "'");
        if (!hyp) throw UnknownStep("no hypothesis is in scope here");
        if (canonical_equation_string(st.claim, free_edges(st.claim)) !=
            canonical_equation_string(*hyp, free_edges(*hyp)))
          throw ClaimMismatch("the claim is not a renaming of the hypothesis");
      } else {
        Equation concl = conclusion(st.just);
        if (!equiv(st.claim.lhs, concl.lhs))
          throw ClaimMismatch(
              "left side is not equivalent to the rule's conclusion");
        if (!equiv(st.claim.rhs, concl.rhs))
          throw ClaimMismatch(
              "right side is not equivalent to the rule's conclusion");
      }
    } catch (const BtError& e) {
      v.ok = false;
      v.message = e.what();
    }
    // The claim enters scope either way; later verdicts stand on their own.
    steps.emplace(st.id, st.claim);
    return v;
  }

  void check_block(const InductionBlock& blk, const Equation& goal,
                   std::vector<StepVerdict>& out) {
    auto top_box = [&](const TensorExpr& t) {
      for (const Factor& f : t.factors)
        if (const auto* b = std::get_if<Box>(&f.v))
          if (b->name == blk.box) return true;
      return false;
    };
    if (!top_box(goal.lhs) || !top_box(goal.rhs)) {
      out.push_back({"induction " + blk.box, false,
                     "'" + blk.box + "' is not a top-level box of the goal"});
      return;
    }

    fixed = nullptr;
    hyp = nullptr;
    for (const ProofStep& st : blk.base) out.push_back(check_step(st));
    StepVerdict bv{"base " + blk.box, true, ""};
    try {
      if (blk.base.empty()) throw ClaimMismatch("the base block is empty");
      Equation killed = apply(goal, BoxOp{OpKind::Kill, blk.box});
      const Equation& last = blk.base.back().claim;
      if (!equiv(last.lhs, killed.lhs) || !equiv(last.rhs, killed.rhs))
        throw ClaimMismatch("the final base step is not the goal after kill");
    } catch (const BtError& e) {
      bv.ok = false;
      bv.message = e.what();
    }
    out.push_back(bv);

    std::set<BoxName> fixed_set{blk.box};
    fixed = &fixed_set;
    hyp = &goal;
    for (const ProofStep& st : blk.step) out.push_back(check_step(st));
    StepVerdict sv{"step " + blk.box, true, ""};
    try {
      if (blk.step.empty()) throw ClaimMismatch("the step block is empty");
      Equation exped = apply(goal, BoxOp{OpKind::Exp, blk.box});
      const Equation& last = blk.step.back().claim;
      if (canonical_equation_string(last, fresh_frees(last, goal)) !=
          canonical_equation_string(exped, fresh_frees(exped, goal)))
        throw ClaimMismatch(
            "the final step is not the expanded goal up to fresh names");
    } catch (const BtError& e) {
      sv.ok = false;
      sv.message = e.what();
    }
    out.push_back(sv);
    fixed = nullptr;
    hyp = nullptr;
  }
};

}  // namespace

bool ProofReport::all_accepted() const {
  return std::all_of(theorems.begin(), theorems.end(),
                     [](const TheoremVerdict& tv) { return tv.accepted; });
}

ProofReport check_proof(const Theory& thy, const ProofScript& script) {
  Checker ck{thy};
  ProofReport report;
  for (const TheoremDecl& th : script.theorems) {
    TheoremVerdict tv;
    tv.name = th.name;
    ck.steps.clear();
    ck.fixed = nullptr;
    ck.hyp = nullptr;
    bool goal_ok = true;
    try {
      ck.validate_claim(th.claim);
    } catch (const BtError& e) {
      goal_ok = false;
      tv.steps.push_back({"goal", false, e.what()});
    }
    if (goal_ok) {
      for (const ProofItem& item : th.items) {
        if (const auto* st = std::get_if<ProofStep>(&item.v))
          tv.steps.push_back(ck.check_step(*st));
        else
          ck.check_block(std::get<InductionBlock>(item.v), th.claim,
                         tv.steps);
      }
    }
    bool all_ok = goal_ok;
    for (const StepVerdict& v : tv.steps) all_ok = all_ok && v.ok;

    bool proves = false;
    std::string final_msg;
    if (th.items.empty()) {
      final_msg = "the proof is empty";
    } else if (std::holds_alternative<InductionBlock>(th.items.back().v)) {
      // the block boundaries already pin the goal
      proves = true;
    } else {
      const ProofStep& last = std::get<ProofStep>(th.items.back().v);
      try {
        proves = equiv(last.claim.lhs, th.claim.lhs) &&
                 equiv(last.claim.rhs, th.claim.rhs);
      } catch (const IllFormed&) {
        proves = false;
      }
      if (!proves) final_msg = "the final step does not prove the theorem";
    }

    tv.accepted = all_ok && proves;
    if (!tv.accepted) {
      if (!all_ok) {
        for (const StepVerdict& v : tv.steps)
          if (!v.ok) {
            tv.summary = "'" + v.id + "': " + v.message;
            break;
          }
      } else {
        tv.summary = final_msg;
      }
    }
    if (tv.accepted)
      ck.lemmas.emplace_back(th.name, th.claim);
    else
      ck.rejected.insert(th.name);
    report.theorems.push_back(std::move(tv));
  }
  return report;
}

std::string to_string(const ProofReport& report) {
  std::string out;
  for (const TheoremVerdict& tv : report.theorems) {
    out += "theorem " + tv.name + "\n";
    for (const StepVerdict& v : tv.steps)
      out += "  " + v.id + ": " + (v.ok ? "ok" : v.message) + "\n";
    out += tv.accepted ? "  accepted\n" : "  REJECTED: " + tv.summary + "\n";
  }
  return out;
}

}  // namespace bt
