// Acceptance suite: ten behavioral criteria, one verdict line each, with
// wall-clock budgets pinned next to the checks they time. Exits nonzero if
// any line fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bt/boxops.hpp"
#include "bt/calculus.hpp"
#include "bt/instantiate.hpp"
#include "bt/model.hpp"
#include "bt/normalize.hpp"
#include "bt/syntax.hpp"
#include "bt/theory.hpp"
#include "bt/wellformed.hpp"
#include "gen.hpp"

using namespace bt;

namespace {

int g_failures = 0;

template <class F>
void criterion(int n, const char* label, double budget_s, F body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  bool in_time = secs <= budget_s;
  bool pass = ok && in_time;
  std::printf("%s criterion %d: %s (%.2fs, budget %.0fs)%s%s\n",
              pass ? "PASS" : "FAIL", n, label, secs, budget_s,
              detail.empty() && in_time ? "" : " -- ",
              !ok ? detail.c_str() : (in_time ? "" : "over budget"));
  if (!pass) ++g_failures;
}

std::string corpus(const std::string& name) {
  return std::string(BT_CORPUS_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const Occurrence* find_occ(const std::vector<Occurrence>& occs, Dir dir,
                           const EdgeName& name) {
  for (const Occurrence& o : occs)
    if (o.dir == dir && o.name == name) return &o;
  return nullptr;
}

int count_occ(const std::vector<Occurrence>& occs, Dir dir,
              const EdgeName& name) {
  int n = 0;
  for (const Occurrence& o : occs)
    if (o.dir == dir && o.name == name) ++n;
  return n;
}

std::vector<BoxName> primed(const std::vector<BoxName>& v, size_t upto,
                            const std::map<BoxName, BoxName>& bmap) {
  std::vector<BoxName> out;
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(i < upto ? bmap.at(v[i]) : v[i]);
  return out;
}

std::vector<BoxName> erased(const std::vector<BoxName>& v, size_t at) {
  std::vector<BoxName> out = v;
  out.erase(out.begin() + at);
  return out;
}

void shuffle_products(TensorExpr& t, std::mt19937& rng) {
  for (Factor& f : t.factors)
    if (auto* b = std::get_if<Box>(&f.v)) shuffle_products(b->body, rng);
  std::shuffle(t.factors.begin(), t.factors.end(), rng);
}

// An equivalent twin: factor orders shuffled, bound edges renamed.
TensorExpr scrambled(const TensorExpr& t, std::mt19937& rng) {
  TensorExpr out = t;
  shuffle_products(out, rng);
  std::set<std::string> edges;
  collect_edge_names(out, edges);
  std::map<EdgeName, EdgeName> emap;
  int k = 0;
  for (const auto& [name, use] : edge_uses(out))
    if (use.out && use.in) {
      std::string fresh;
      do {
        fresh = "q" + std::to_string(++k);
      } while (edges.count(fresh));
      emap[name] = fresh;
    }
  substitute_names(out, emap, {});
  return out;
}

// Complete random instantiation: expand a while, then kill everything off.
Instantiation random_instantiation(TensorExpr t, std::mt19937& rng, int cap) {
  Instantiation out;
  int exps = 0;
  for (;;) {
    std::vector<BoxName> boxes = box_factor_names(t);
    if (boxes.empty()) break;
    BoxName b =
        boxes[std::uniform_int_distribution<size_t>(0, boxes.size() - 1)(rng)];
    bool expand =
        exps < cap && std::uniform_int_distribution<int>(0, 99)(rng) < 40;
    BoxOp op{expand ? OpKind::Exp : OpKind::Kill, b};
    t = bt::apply(t, op);
    out.push_back(op);
    if (expand) ++exps;
  }
  return out;
}

std::vector<std::string> op_strings(const Instantiation& i) {
  std::vector<std::string> out;
  for (const BoxOp& op : i) out.push_back(to_string(op));
  return out;
}

const StepVerdict* find_step(const TheoremVerdict& tv, const std::string& id) {
  for (const StepVerdict& s : tv.steps)
    if (s.id == id) return &s;
  return nullptr;
}

bool crit1_literal_verdicts(std::string& d) {
  if (!is_wellformed(parse_tensor("psi{[+a>A} [phi{-a}]A"))) {
    d = "the marked-output term should be accepted";
    return false;
  }
  WfReport c3 = check_wellformed(parse_tensor("psi{+a} [phi{-a}]A"));
  if (c3.ok() || c3.violations.size() != 1 || c3.violations[0].rule != "C3" ||
      c3.violations[0].subject != "a") {
    d = "the unmarked crossing should be exactly one C3 on a";
    return false;
  }
  if (to_string(c3.violations[0]).rfind("C3 violation on a", 0) != 0) {
    d = "violation text should start with 'C3 violation on a'";
    return false;
  }
  WfReport c2 = check_wellformed(parse_tensor("phi{[[-a>A>B} [[psi{-b}]B]A"));
  bool has_c2 = false;
  for (const Violation& v : c2.violations) has_c2 |= v.rule == "C2";
  if (c2.ok() || !has_c2) {
    d = "the inverted marker chain should raise C2";
    return false;
  }
  return true;
}

bool crit2_ops_preserve_wf(std::string& d) {
  std::mt19937 rng(20260815);
  int terms = 0;
  while (terms < 200) {
    TensorExpr t = btgen::random_wf_term(rng);
    std::vector<BoxName> boxes = box_factor_names(t);
    if (boxes.empty()) continue;
    ++terms;
    for (const BoxName& b : boxes)
      for (OpKind k : {OpKind::Exp, OpKind::Kill, OpKind::Copy, OpKind::Drop}) {
        TensorExpr r = bt::apply(t, BoxOp{k, b});
        if (!is_wellformed(r)) {
          d = to_string(BoxOp{k, b}) + " broke " + print(t) + " -> " + print(r);
          return false;
        }
      }
  }
  return true;
}

bool crit3_factorization_and_congruence(std::string& d) {
  std::mt19937 rng(5551212);
  // Exp_B = Drop_{fr(B)} . Copy_B with one fresh supply, byte for byte
  int terms = 0;
  while (terms < 200) {
    TensorExpr t = btgen::random_wf_term(rng);
    std::vector<BoxName> boxes = box_factor_names(t);
    if (boxes.empty()) continue;
    ++terms;
    for (const BoxName& b : boxes) {
      FreshNames f1(t), f2(t);
      TensorExpr via_exp = op_exp(t, b, f1);
      TensorExpr via_copy = op_drop(op_copy(t, b, f2), f2.box(b));
      if (print(via_exp) != print(via_copy)) {
        d = "exp != drop.copy on " + print(t) + " box " + b;
        return false;
      }
    }
  }
  // equivalent inputs give equivalent outputs, for all four operations
  int pairs = 0;
  while (pairs < 100) {
    TensorExpr t = btgen::random_wf_term(rng);
    std::vector<BoxName> boxes = box_factor_names(t);
    if (boxes.empty()) continue;
    ++pairs;
    TensorExpr s = scrambled(t, rng);
    if (!equiv(t, s)) {
      d = "twin generator produced a non-equivalent pair: " + print(t);
      return false;
    }
    for (const BoxName& b : boxes)
      for (OpKind k : {OpKind::Exp, OpKind::Kill, OpKind::Copy, OpKind::Drop})
        if (!equiv(bt::apply(t, BoxOp{k, b}), bt::apply(s, BoxOp{k, b}))) {
          d = to_string(BoxOp{k, b}) + " is not a congruence on " + print(t);
          return false;
        }
  }
  return true;
}

bool crit4_context_table(std::string& d) {
  std::mt19937 rng(8911);
  int triples = 0;
  int terms = 0;
  while (terms < 200) {
    TensorExpr t = btgen::random_wf_term(rng);
    if (box_factor_names(t).empty()) continue;
    ++terms;
    auto occs0 = occurrences(t);
    for (const BoxName& x : box_factor_names(t)) {
      std::string at = print(t) + " box " + x;
      FreshNames fe(t), fc(t);
      auto o_exp = occurrences(op_exp(t, x, fe));
      auto o_copy = occurrences(op_copy(t, x, fc));
      auto o_kill = occurrences(op_kill(t, x));
      auto o_drop = occurrences(op_drop(t, x));

      for (const Occurrence& o : occs0) {
        auto e_it = std::find(o.ectx.begin(), o.ectx.end(), x);
        auto n_it = std::find(o.nctx.begin(), o.nctx.end(), x);
        bool in_e = e_it != o.ectx.end();
        bool in_n = !in_e && n_it != o.nctx.end();
        size_t ei = in_e ? static_cast<size_t>(e_it - o.ectx.begin()) : 0;
        size_t ni = in_n ? static_cast<size_t>(n_it - o.nctx.begin()) : 0;
        triples += 4;

        // kill: occurrences under x vanish, the rest keep their contexts
        const Occurrence* k = find_occ(o_kill, o.dir, o.name);
        if (in_e || in_n) {
          if (k) {
            d = "kill kept " + o.name + " in " + at;
            return false;
          }
        } else if (!k || k->ectx != o.ectx || k->nctx != o.nctx) {
          d = "kill moved " + o.name + " in " + at;
          return false;
        }

        // drop: x disappears from whichever context held it
        const Occurrence* dr = find_occ(o_drop, o.dir, o.name);
        std::vector<BoxName> want_e = in_e ? erased(o.ectx, ei) : o.ectx;
        std::vector<BoxName> want_n = in_n ? erased(o.nctx, ni) : o.nctx;
        if (!dr || dr->ectx != want_e || dr->nctx != want_n) {
          d = "drop mismapped " + o.name + " in " + at;
          return false;
        }

        // exp and copy keep every original untouched
        const Occurrence* e = find_occ(o_exp, o.dir, o.name);
        const Occurrence* c = find_occ(o_copy, o.dir, o.name);
        if (!e || e->ectx != o.ectx || e->nctx != o.nctx || !c ||
            c->ectx != o.ectx || c->nctx != o.nctx) {
          d = "exp/copy disturbed the original " + o.name + " in " + at;
          return false;
        }

        if (in_e || in_n) {
          // exp: the copy loses x and primes everything inside it
          EdgeName en = fe.edge_map().at(o.name);
          if (count_occ(o_exp, o.dir, en) != 1) {
            d = "exp did not mint one copy of " + o.name + " in " + at;
            return false;
          }
          const Occurrence* ce = find_occ(o_exp, o.dir, en);
          std::vector<BoxName> we =
              in_e ? erased(primed(o.ectx, ei, fe.box_map()), ei)
                   : primed(o.ectx, o.ectx.size(), fe.box_map());
          std::vector<BoxName> wn =
              in_e ? o.nctx : erased(primed(o.nctx, ni, fe.box_map()), ni);
          if (ce->ectx != we || ce->nctx != wn) {
            d = "exp primed entry wrong for " + o.name + " in " + at;
            return false;
          }
          // copy: the copy keeps a primed x
          EdgeName cn = fc.edge_map().at(o.name);
          if (count_occ(o_copy, o.dir, cn) != 1) {
            d = "copy did not mint one copy of " + o.name + " in " + at;
            return false;
          }
          const Occurrence* cc = find_occ(o_copy, o.dir, cn);
          std::vector<BoxName> wce =
              in_e ? primed(o.ectx, ei + 1, fc.box_map())
                   : primed(o.ectx, o.ectx.size(), fc.box_map());
          std::vector<BoxName> wcn =
              in_e ? o.nctx : primed(o.nctx, ni + 1, fc.box_map());
          if (cc->ectx != wce || cc->nctx != wcn) {
            d = "copy primed entry wrong for " + o.name + " in " + at;
            return false;
          }
        } else if (fe.edge_map().count(o.name) &&
                   count_occ(o_exp, o.dir, fe.edge_map().at(o.name)) != 0) {
          d = "exp copied an outside occurrence " + o.name + " in " + at;
          return false;
        }
      }
    }
  }
  if (triples < 200) {
    d = "only " + std::to_string(triples) + " triples sampled";
    return false;
  }
  return true;
}

bool crit5_normal_form(std::string& d) {
  std::mt19937 rng(90210);
  btgen::Opts opts;
  opts.max_boxes = 4;
  opts.max_depth = 3;
  opts.max_gens = 3;
  opts.max_edges = 5;
  int checked = 0;
  while (checked < 100) {
    TensorExpr g = btgen::random_wf_term(rng, opts);
    if (box_factor_names(g).empty()) continue;
    ++checked;
    Instantiation i = random_instantiation(g, rng, 5);
    Instantiation nf = normal_form(i, g);
    TensorExpr a = apply_instantiation(i, g);
    TensorExpr b = apply_instantiation(nf, g);
    if (instance_key(a, g) != instance_key(b, g)) {
      d = "normal form changed the instance of " + print(g);
      return false;
    }
    if (op_strings(normal_form(nf, g)) != op_strings(nf)) {
      d = "normal form is not idempotent on " + print(g);
      return false;
    }
  }
  return true;
}

bool crit6_instance_counts(std::string& d) {
  TensorExpr spider = parse_tensor(slurp(corpus("spider.bt")));
  for (int n = 0; n <= 4; ++n) {
    std::vector<TensorExpr> inst =
        enumerate_instances(spider, InstanceBound{n});
    std::set<std::string> texts;
    for (const TensorExpr& t : inst) texts.insert(print(t));
    if (static_cast<int>(inst.size()) != n + 1 ||
        texts.size() != inst.size()) {
      d = "spider bound " + std::to_string(n) + " gave " +
          std::to_string(inst.size()) + " instances";
      return false;
    }
  }
  TensorExpr two = parse_tensor(slurp(corpus("two_boxes.bt")));
  if (enumerate_instances(two, InstanceBound{1}).size() != 4) {
    d = "two independent boxes at bound 1 should give 4 instances";
    return false;
  }
  return true;
}

bool crit7_proof_corpus(std::string& d) {
  Theory monoid = parse_theory(slurp(corpus("monoid.bth")));
  Theory anti = parse_theory(slurp(corpus("antihom.bth")));
  validate_theory(monoid);
  validate_theory(anti);

  ProofReport merge =
      check_proof(monoid, parse_proof(slurp(corpus("merge.btp"))));
  if (!merge.all_accepted() || merge.theorems.size() != 2) {
    d = "merge lemma/theorem should be accepted:\n" + to_string(merge);
    return false;
  }
  ProofReport ah = check_proof(anti, parse_proof(slurp(corpus("antihom.btp"))));
  if (!ah.all_accepted() || ah.theorems.size() != 1) {
    d = "the antihomomorphism proof should be accepted:\n" + to_string(ah);
    return false;
  }

  // each mutant fails at a named step or block boundary
  ProofReport unfixed =
      check_proof(monoid, parse_proof(slurp(corpus("merge_unfixed.btp"))));
  const StepVerdict* t0 = find_step(unfixed.theorems[0], "t0");
  if (unfixed.theorems[0].accepted || !t0 ||
      t0->message != "'B' is fixed in this induction step") {
    d = "operating on a fixed box should fail at t0";
    return false;
  }

  ProofReport wrong =
      check_proof(monoid, parse_proof(slurp(corpus("merge_wrong_base.btp"))));
  const StepVerdict* base = find_step(wrong.theorems[1], "base C");
  if (wrong.theorems[1].accepted || !base || base->ok ||
      wrong.theorems[1].summary.find("base C") == std::string::npos) {
    d = "the wrong base case should fail at the base boundary";
    return false;
  }

  ProofReport flipped =
      check_proof(anti, parse_proof(slurp(corpus("antihom_flipped.btp"))));
  const StepVerdict* c5 = find_step(flipped.theorems[0], "c5");
  if (flipped.theorems[0].accepted || !c5 || c5->ok ||
      flipped.theorems[0].summary.find("c5") == std::string::npos) {
    d = "the flipped arc should fail at the hypothesis step c5";
    return false;
  }
  return true;
}

bool crit8_instance_family(std::string& d) {
  Theory monoid = parse_theory(slurp(corpus("monoid.bth")));
  ProofScript merge = parse_proof(slurp(corpus("merge.btp")));
  std::vector<std::pair<std::string, Equation>> eqs = monoid.axioms;
  for (const TheoremDecl& th : merge.theorems)
    if (th.name == "merge_theorem") eqs.emplace_back(th.name, th.claim);

  for (const auto& [name, eq] : eqs) {
    std::vector<BoxName> lhs_boxes = box_factor_names(eq.lhs);
    std::vector<BoxName> rhs_boxes = box_factor_names(eq.rhs);
    std::set<std::string> super;
    for (const Equation& inst : instantiate_equation(eq, InstanceBound{2}))
      super.insert(instance_key(inst, eq));
    for (const BoxName& b : lhs_boxes) {
      if (std::find(rhs_boxes.begin(), rhs_boxes.end(), b) == rhs_boxes.end())
        continue;
      // one expansion or the kill, then everything within the leftover bound
      for (OpKind k : {OpKind::Exp, OpKind::Kill}) {
        Equation oped = bt::apply(eq, BoxOp{k, b});
        for (const Equation& inst : instantiate_equation(oped, InstanceBound{1}))
          if (!super.count(instance_key(inst, eq))) {
            d = to_string(BoxOp{k, b}) + " escaped the family of " + name;
            return false;
          }
      }
      // every bounded instance of the copied rule flattens to exp/kill steps
      Equation copied = bt::apply(eq, BoxOp{OpKind::Copy, b});
      int seen = 0;
      for (const Instantiation& steps :
           enumerate_equation_instantiations(copied, InstanceBound{1})) {
        std::vector<BoxOp> full{BoxOp{OpKind::Copy, b}};
        full.insert(full.end(), steps.begin(), steps.end());
        Instantiation flat = eliminate_copies(eq, full);
        for (const BoxOp& op : flat)
          if (op.kind != OpKind::Exp && op.kind != OpKind::Kill) {
            d = "copy elimination left a non-exp/kill step on " + name;
            return false;
          }
        if (instance_key(apply_instantiation(flat, eq), eq) !=
            instance_key(bt::apply(eq, full), eq)) {
          d = "copy elimination changed an instance of " + name;
          return false;
        }
        ++seen;
      }
      if (seen < 4) {
        d = "too few copied instances exercised on " + name;
        return false;
      }
    }
  }
  return true;
}

bool crit9_matrix_model(std::string& d) {
  Theory monoid = parse_theory(slurp(corpus("monoid.bth")));
  std::vector<std::pair<std::string, Equation>> eqs = monoid.axioms;
  for (const char* script : {"merge.btp", "antihom.btp"}) {
    ProofScript ps = parse_proof(slurp(corpus(script)));
    for (const TheoremDecl& th : ps.theorems)
      eqs.emplace_back(th.name, th.claim);
  }

  Model m2 = builtin_matrix_algebra_model(2);
  for (const auto& [name, eq] : eqs) {
    InstanceReport r = check_equation_instances(eq, m2, InstanceBound{2});
    if (!r.ok()) {
      d = name + " failed in the matrix model: " + r.failures[0].detail;
      return false;
    }
    if (r.checked < 1) {
      d = name + " checked no instances";
      return false;
    }
  }

  // single mutation: m becomes the symmetrized product (xy + yx) / 2
  Model sym = builtin_matrix_algebra_model(2);
  sym.semiring = Semiring::Rat;
  std::vector<Rat>& data = sym.gens.at({"m", "^vv"});
  std::vector<Rat> orig = data;
  int dim = sym.dim;
  for (int o = 0; o < dim; ++o)
    for (int x = 0; x < dim; ++x)
      for (int y = 0; y < dim; ++y)
        data[(o * dim + x) * dim + y] =
            (orig[(o * dim + x) * dim + y] + orig[(o * dim + y) * dim + x]) *
            rat(1, 2);

  int mutated_failures = 0;
  for (const auto& [name, eq] : eqs) {
    (void)name;
    mutated_failures += static_cast<int>(
        check_equation_instances(eq, sym, InstanceBound{2}).failures.size());
  }
  if (mutated_failures < 1) {
    d = "the symmetrized product slipped through every instance";
    return false;
  }
  return true;
}

bool crit10_roundtrip(std::string& d) {
  std::mt19937 rng(777001);
  for (int i = 0; i < 1000; ++i) {
    TensorExpr t = btgen::random_wf_term(rng);
    TensorExpr back = parse_tensor(print(t));
    if (to_json(back) != to_json(t)) {
      d = "print/parse changed the structure of " + print(t);
      return false;
    }
  }
  TensorExpr worked = parse_tensor(slurp(corpus("worked_example.bt")));
  std::string s = print(canonical_form(worked));
  if (print(parse_tensor(s)) != s) {
    d = "the normalized worked example is not byte-stable";
    return false;
  }
  if (print(canonical_form(parse_tensor(s))) != s) {
    d = "normalization is not idempotent on the worked example";
    return false;
  }
  return true;
}

}  // namespace

int main() {
  std::printf("acceptance: !-tensor engine and proof checker\n");
  criterion(1, "literal verdicts: accepted term, C3 crossing, C2 chain", 1.0,
            crit1_literal_verdicts);
  criterion(2, "box operations preserve well-formedness", 10.0,
            crit2_ops_preserve_wf);
  criterion(3, "expansion factors through copy+drop; ops are congruences",
            10.0, crit3_factorization_and_congruence);
  criterion(4, "contexts move exactly as the tracking table says", 10.0,
            crit4_context_table);
  criterion(5, "normal forms reproduce instances and are idempotent", 10.0,
            crit5_normal_form);
  criterion(6, "instance counts: spider n+1, independent boxes 4", 1.0,
            crit6_instance_counts);
  criterion(7, "proof corpus accepted, mutants rejected at named steps", 5.0,
            crit7_proof_corpus);
  criterion(8, "exp/kill/copy rule uses stay inside the instance family", 30.0,
            crit8_instance_family);
  criterion(9, "exact matrix model accepts the laws, refutes the mutation",
            30.0, crit9_matrix_model);
  criterion(10, "print/parse round-trip and normalized byte identity", 5.0,
            crit10_roundtrip);
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
