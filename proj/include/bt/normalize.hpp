#pragma once

#include <set>
#include <string>

#include "bt/term.hpp"

namespace bt {

// Structural cleanup preserving equivalence: drops unit factors and empty
// groups, then contracts identity wires against their partner occurrence.
// Bare wires and self-loops (circles) survive.
TensorExpr clean(const TensorExpr&);

// Canonical printed form. Two well-formed terms are equivalent iff their
// canonical strings agree. Bound edges are always renamed to b1, b2, ...;
// free edges listed in `renameable_free` to f1, f2, ...; all other free
// edges and every box name are kept verbatim.
std::string canonical_string(const TensorExpr&,
                             const std::set<EdgeName>& renameable_free = {});
TensorExpr canonical_form(const TensorExpr&,
                          const std::set<EdgeName>& renameable_free = {});

// Equivalence of well-formed terms; throws IllFormed otherwise.
bool equiv(const TensorExpr&, const TensorExpr&);
// Same, but additionally up to renaming of the listed free edges.
bool equiv_mod(const TensorExpr&, const TensorExpr&,
               const std::set<EdgeName>& renameable_free);

// Joint canonical print "lhs = rhs". Bound edges rename per side, but the
// listed renameable frees share one assignment across both sides, so a name
// paired between the sides stays paired. Ties permute jointly, taking the
// minimum over the combined print.
std::string canonical_equation_string(
    const Equation&, const std::set<EdgeName>& renameable_free = {});

}  // namespace bt
