#include <doctest.h>

#include <string>

#include "bt/normalize.hpp"
#include "bt/render.hpp"
#include "bt/syntax.hpp"
#include "bt/term.hpp"
#include "bt/wellformed.hpp"

using namespace bt;

namespace {

int count(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (size_t at = hay.find(needle); at != std::string::npos;
       at = hay.find(needle, at + needle.size()))
    ++n;
  return n;
}

}  // namespace

TEST_CASE("the empty product renders as an empty digraph") {
  CHECK(to_dot(parse_tensor("1")) == "digraph bt {\n}\n");
  CHECK(to_dot(parse_tensor("1 1 1")) == "digraph bt {\n}\n");
}

TEST_CASE("a lone box is a single dashed cluster") {
  std::string dot = to_dot(parse_tensor("[1]A"));
  CHECK(count(dot, "subgraph") == 1);
  CHECK(count(dot, "style=dashed") == 1);
  CHECK(dot.find("label=\"A\"") != std::string::npos);
  CHECK(count(dot, "->") == 0);
}

TEST_CASE("a generator node carries its printed edgeterm as label") {
  std::string dot = to_dot(parse_tensor("phi{+a <(-b)]C} []C"));
  CHECK(dot.find("\"n0\" [label=\"phi{+a <(-b)]C}\"]") != std::string::npos);
}

TEST_CASE("bound pairs run from the output occurrence to the input occurrence") {
  std::string dot = to_dot(parse_tensor("psi{-x} phi{+x}"));
  // phi holds +x and was emitted second
  CHECK(dot.find("\"n1\" -> \"n0\" [label=\"x\"]") != std::string::npos);
  CHECK(count(dot, " -> ") == 1);
  CHECK(count(dot, "f_") == 0);
}

TEST_CASE("free edges attach to boundary nodes, direction preserved") {
  std::string dot = to_dot(parse_tensor("psi{+a -c}"));
  CHECK(count(dot, "shape=plaintext") == 2);
  CHECK(dot.find("\"n0\" -> \"f_a\"") != std::string::npos);
  CHECK(dot.find("\"f_c\" -> \"n0\"") != std::string::npos);
}

TEST_CASE("wires are nodes too; a circle is a self-loop") {
  std::string dot = to_dot(parse_tensor("id{+a -b}"));
  CHECK(dot.find("[label=\"id{+a -b}\"]") != std::string::npos);
  CHECK(dot.find("\"n0\" -> \"f_a\"") != std::string::npos);
  CHECK(dot.find("\"f_b\" -> \"n0\"") != std::string::npos);

  std::string circle = to_dot(parse_tensor("id{+z -z}"));
  CHECK(circle.find("\"n0\" -> \"n0\" [label=\"z\"]") != std::string::npos);
  CHECK(count(circle, "f_") == 0);
}

TEST_CASE("the worked example keeps its structure") {
  TensorExpr t = parse_tensor(
      "phi{+a [<(-e)]B>A <(-d)]C} [psi{+d -c}]C [[psi{+e -b}]B]A");
  std::string dot = to_dot(t);

  CHECK(count(dot, "[label=\"phi") + count(dot, "[label=\"psi") == 3);
  CHECK(count(dot, "subgraph") == 3);
  CHECK(count(dot, "style=dashed") == 3);

  // B's cluster opens inside A's
  size_t a_at = dot.find("label=\"A\"");
  size_t b_at = dot.find("label=\"B\"");
  size_t a_close = dot.find("\n  }", a_at);
  REQUIRE(a_at != std::string::npos);
  REQUIRE(b_at != std::string::npos);
  CHECK(a_at < b_at);
  CHECK(b_at < a_close);

  // bound pairs d and e, one edge each
  CHECK(dot.find("\"n1\" -> \"n0\" [label=\"d\"]") != std::string::npos);
  CHECK(dot.find("\"n2\" -> \"n0\" [label=\"e\"]") != std::string::npos);

  // frees a, c, b on the boundary
  CHECK(count(dot, "shape=plaintext") == 3);
  CHECK(dot.find("\"n0\" -> \"f_a\"") != std::string::npos);
  CHECK(dot.find("\"f_c\" -> \"n1\"") != std::string::npos);
  CHECK(dot.find("\"f_b\" -> \"n2\"") != std::string::npos);

  CHECK(count(dot, " -> ") == 5);
}

TEST_CASE("output is deterministic and stable under canonicalization") {
  TensorExpr a = parse_tensor("psi{-x} phi{+x}");
  TensorExpr b = parse_tensor("psi{-y} phi{+y}");
  REQUIRE(equiv(a, b));
  CHECK(to_dot(a) == to_dot(a));
  CHECK(to_dot(canonical_form(a)) == to_dot(canonical_form(b)));
}

TEST_CASE("ill-formed input is refused") {
  CHECK_THROWS_AS(to_dot(parse_tensor("psi{+a} [phi{-a}]A")), IllFormed);
  CHECK_THROWS_AS(to_dot(parse_tensor("phi{+a} xi{+a}")), IllFormed);
}
