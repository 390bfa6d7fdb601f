#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bt/syntax.hpp"
#include "bt/term.hpp"

namespace bt {

// Regular pattern over leg directions: '^' one output, 'v' one input,
// '(...)* ' any number of repetitions of the bracketed pattern.  A generator
// declared with a pattern may carry any edgeterm whose reachable leg words
// all lie in the pattern's language.
struct ArityPattern {
  struct Item {
    bool star = false;
    Dir dir = Dir::Out;            // leaf payload when !star
    std::vector<Item> sub;         // body when star
    bool operator==(const Item&) const = default;
  };
  std::vector<Item> items;
  bool operator==(const ArityPattern&) const = default;
};

ArityPattern parse_arity(TokenStream& ts);
ArityPattern parse_arity(const std::string& src);
std::string to_string(const ArityPattern& p);

// Language inclusion: every leg word the edgeterm can produce (groups repeat
// zero or more times) matches the pattern.  On failure *witness receives a
// shortest reachable word outside the pattern.
bool arity_admits(const ArityPattern& pat, const EdgeTerm& edges,
                  std::string* witness = nullptr);

struct Theory {
  std::map<std::string, ArityPattern> gens;
  std::vector<std::pair<std::string, Equation>> axioms;

  const Equation* find_axiom(const std::string& name) const;
};

Theory parse_theory(const std::string& src);

// Every generator occurrence must be declared and admitted by its pattern.
void check_arities(const Theory& thy, const TensorExpr& t);

// Axioms must be well-formed, respect the arities and relate compatible
// sides.
void validate_theory(const Theory& thy);

}  // namespace bt
