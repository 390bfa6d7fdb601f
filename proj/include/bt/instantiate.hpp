#pragma once

#include <string>
#include <vector>

#include "bt/boxops.hpp"
#include "bt/term.hpp"

namespace bt {

// Ordered run of exp/kill steps, applied front to back with a fresh name
// supply per step.
using Instantiation = std::vector<BoxOp>;

struct InstanceBound {
  int n = 0;  // expansions allowed per surfaced box
};

// No box factors and no group markers anywhere.
bool is_concrete(const TensorExpr&);

// Applies the steps in order. Only exp and kill are legal here; a missing
// target reports the failing step index.
TensorExpr apply_instantiation(const Instantiation&, const TensorExpr&);
Equation apply_instantiation(const Instantiation&, const Equation&);

// Reorders a complete instantiation so the lexicographically least top-level
// box goes first (its expansions, then its kill), recursively for the boxes
// that surface afterwards. The result uses plain per-step freshness yet
// reproduces the original instance up to renaming of the fresh frees.
// Idempotent. Throws IncompleteInstantiation when boxes survive.
Instantiation normal_form(const Instantiation&, const TensorExpr&);

// Every instance reachable with at most n expansions of each surfaced box,
// deduplicated up to fresh-free renaming, ordered by canonical print.
std::vector<TensorExpr> enumerate_instances(const TensorExpr&, InstanceBound);
// The normal-form sequences behind the same recursion, undeduplicated.
std::vector<Instantiation> enumerate_instantiations(const TensorExpr&,
                                                    InstanceBound);

// On an equation every step shares one supply across both sides, so matching
// names stay matched; dedup keys on the joint canonical print.
std::vector<Equation> instantiate_equation(const Equation&, InstanceBound);
std::vector<Instantiation> enumerate_equation_instantiations(const Equation&,
                                                             InstanceBound);

// Dedup key: canonical print with the fresh frees (those not already free in
// the original) renameable.
std::string instance_key(const TensorExpr& inst, const TensorExpr& original);
std::string instance_key(const Equation& inst, const Equation& original);

// Rewrites a copy-bearing run into exp/kill steps yielding the same instance
// up to fresh renaming: a copy shares its original's expansions instead of
// being taken separately. Steps must target top-level boxes; drop is not
// accepted.
Instantiation eliminate_copies(const TensorExpr&, const std::vector<BoxOp>&);
Instantiation eliminate_copies(const Equation&, const std::vector<BoxOp>&);

}  // namespace bt
