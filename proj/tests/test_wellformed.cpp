#include <doctest.h>

#include <random>

#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

using namespace bt;

namespace {

using Ctx = std::vector<BoxName>;

Ctx cat(const Ctx& a, const Ctx& b) {
  Ctx out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// A witness is only a witness if both displayed equations hold verbatim.
void check_witness_equations(const Ctx& es, const Ctx& bs, const Ctx& ectx_out,
                             const Ctx& nctx_out, const Ctx& ectx_in,
                             const Ctx& nctx_in) {
  CHECK(cat(es, nctx_out) == cat(ectx_in, bs));
  CHECK(cat(es, nctx_in) == cat(ectx_out, bs));
}

std::vector<std::string> rules_of(const WfReport& r) {
  std::vector<std::string> out;
  for (const Violation& v : r.violations) out.push_back(v.rule + " " + v.subject);
  return out;
}

bool has_rule(const WfReport& r, const std::string& rule,
              const std::string& subject) {
  for (const Violation& v : r.violations)
    if (v.rule == rule && v.subject == subject) return true;
  return false;
}

}  // namespace

TEST_CASE("bound pairs in plain products and boxes") {
  WfReport r = check_wellformed(parse_tensor("[psi{+a} phi{-a}]A"));
  REQUIRE(r.ok());
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].name == "a");
  CHECK(r.witnesses[0].es == Ctx{});
  CHECK(r.witnesses[0].bs == Ctx{"A"});
}

TEST_CASE("bound pair through matching groups") {
  WfReport r = check_wellformed(parse_tensor("psi{[+a>A} phi{<(-a)]A} []A"));
  REQUIRE(r.ok());
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].es == Ctx{"A"});
  CHECK(r.witnesses[0].bs == Ctx{});
}

TEST_CASE("group on one side only breaks the binding condition") {
  WfReport r = check_wellformed(parse_tensor("psi{[+a>A} phi{-a} []A"));
  CHECK(has_rule(r, "C3", "a"));

  WfReport r2 = check_wellformed(parse_tensor("psi{+a} [phi{-a}]A"));
  CHECK(rules_of(r2) == std::vector<std::string>{"C3 a"});
}

TEST_CASE("worked example is well-formed with trivial witnesses") {
  WfReport r = check_wellformed(parse_tensor(
      "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A"));
  REQUIRE(r.ok());
  REQUIRE(r.witnesses.size() == 2);
  CHECK(r.witnesses[0].name == "d");
  CHECK(r.witnesses[0].es == Ctx{});
  CHECK(r.witnesses[0].bs == Ctx{});
  CHECK(r.witnesses[1].name == "e");
  CHECK(r.witnesses[1].es == Ctx{});
  CHECK(r.witnesses[1].bs == Ctx{});
}

TEST_CASE("duplicate directed edges are F1") {
  WfReport r = check_wellformed(parse_tensor("psi{+a} phi{+a}"));
  CHECK(rules_of(r) == std::vector<std::string>{"F1 a"});
  CHECK(r.violations[0].detail == "+a occurs 2 times");

  CHECK(has_rule(check_wellformed(parse_tensor("id{+a -b} psi{-b}")), "F1", "b"));
}

TEST_CASE("duplicate box factors are F2") {
  WfReport r = check_wellformed(parse_tensor("[]A [x{}]A"));
  CHECK(rules_of(r) == std::vector<std::string>{"F2 A"});
  CHECK(has_rule(check_wellformed(parse_tensor("[[x{}]B]A []B")), "F2", "B"));
}

TEST_CASE("group and box for the same name is C1") {
  WfReport r = check_wellformed(parse_tensor("[f{[(-a)>A}]A"));
  CHECK(has_rule(r, "C1", "a"));
}

TEST_CASE("group markers must anchor to their box") {
  // marker context must continue into the box's own context
  CHECK(rules_of(check_wellformed(parse_tensor("[psi{[+a>B}]A []B"))) ==
        std::vector<std::string>{"C2 a"});
  CHECK(rules_of(check_wellformed(parse_tensor("psi{[-a>B} [[phi{}]B]A"))) ==
        std::vector<std::string>{"C2 a"});

  WfReport r = check_wellformed(parse_tensor("psi{[+a>Q}"));
  REQUIRE(rules_of(r) == std::vector<std::string>{"C2 a"});
  CHECK(r.violations[0].detail.find("no box factor") != std::string::npos);

  CHECK(check_wellformed(parse_tensor("f{[<(-a)]B>A} [[g{+a}]B]A")).ok());
  CHECK(check_wellformed(parse_tensor("s{[(-a)>A} []A")).ok());
}

TEST_CASE("insertion into a box keeps bindings through its boundary") {
  WfReport r =
      check_wellformed(parse_tensor("[psi{-a +b} xi{+a}]A phi{<(-b)]A}"));
  REQUIRE(r.ok());
  REQUIRE(r.witnesses.size() == 2);
  CHECK(r.witnesses[0].name == "a");
  CHECK(r.witnesses[0].bs == Ctx{"A"});
  CHECK(r.witnesses[1].name == "b");
  CHECK(r.witnesses[1].es == Ctx{});
  CHECK(r.witnesses[1].bs == Ctx{});
}

TEST_CASE("require_wellformed reports every violation") {
  CHECK_NOTHROW(require_wellformed(parse_tensor("m{+a -u -v}")));
  try {
    require_wellformed(parse_tensor("psi{+a} [phi{-a}]A []A"), "input");
    FAIL("expected throw");
  } catch (const IllFormed& e) {
    std::string msg = e.what();
    CHECK(msg.find("input is not well-formed") != std::string::npos);
    CHECK(msg.find("F2 violation on A") != std::string::npos);
    CHECK(msg.find("C3 violation on a") != std::string::npos);
  }
}

TEST_CASE("witnesses satisfy both context equations") {
  const char* cases[] = {
      "[psi{+a} phi{-a}]A",
      "psi{[+a>A} phi{<(-a)]A} []A",
      "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A",
      "[psi{-a +b} xi{+a}]A phi{<(-b)]A}",
      "f{[<(-a)]B>A} [[g{+a}]B]A",
      "id{+a -a}",
      "[id{+a -a}]A",
  };
  for (const char* src : cases) {
    CAPTURE(src);
    TensorExpr t = parse_tensor(src);
    WfReport r = check_wellformed(t);
    REQUIRE(r.ok());
    auto occs = occurrences(t);
    for (const BoundWitness& w : r.witnesses) {
      const Occurrence *po = nullptr, *pi = nullptr;
      for (const Occurrence& o : occs)
        if (o.name == w.name) (o.dir == Dir::Out ? po : pi) = &o;
      REQUIRE(po);
      REQUIRE(pi);
      check_witness_equations(w.es, w.bs, po->ectx, po->nctx, pi->ectx,
                              pi->nctx);
    }
  }
}

// The implementation only tries prefixes of either ectx as es. Check that
// against a brute-force search over every short word: existence must agree.
TEST_CASE("prefix witness search matches brute force") {
  std::vector<std::string> alpha{"X", "Y"};
  std::vector<Ctx> words{{}};
  {
    size_t lo = 0;
    for (int len = 1; len <= 6; ++len) {
      size_t hi = words.size();
      for (size_t i = lo; i < hi; ++i)
        for (const std::string& a : alpha) {
          Ctx w = words[i];
          w.push_back(a);
          words.push_back(std::move(w));
        }
      lo = hi;
    }
  }

  auto brute = [&](const Ctx& A1, const Ctx& N1, const Ctx& A2,
                   const Ctx& N2) {
    for (const Ctx& es : words) {
      Ctx lhs2 = cat(es, N2);
      if (lhs2.size() < A1.size() ||
          !std::equal(A1.begin(), A1.end(), lhs2.begin()))
        continue;
      Ctx bs(lhs2.begin() + A1.size(), lhs2.end());
      if (cat(es, N1) == cat(A2, bs)) return true;
    }
    return false;
  };

  std::mt19937 rng(20260815);
  std::uniform_int_distribution<int> len(0, 3), letter(0, 1);
  auto rand_ctx = [&] {
    Ctx c;
    int n = len(rng);
    for (int i = 0; i < n; ++i) c.push_back(alpha[letter(rng)]);
    return c;
  };

  int witnessed = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    Ctx A1 = rand_ctx(), N1 = rand_ctx(), A2 = rand_ctx(), N2 = rand_ctx();
    auto fast = find_context_witness(A1, N1, A2, N2);
    bool slow = brute(A1, N1, A2, N2);
    if (fast.has_value() != slow) {
      CAPTURE(trial);
      REQUIRE(fast.has_value() == slow);
    }
    if (fast) {
      ++witnessed;
      check_witness_equations(fast->first, fast->second, A1, N1, A2, N2);
    }
  }
  CHECK(witnessed > 500);  // the comparison must not be vacuous
}
