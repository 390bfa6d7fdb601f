#pragma once

#include <string>

#include "bt/term.hpp"

namespace bt {

// DOT export of a well-formed term: generators and wires become nodes
// labeled with their printed form (edge order and group arcs live in the
// label), boxes become dashed clusters, every bound pair one edge from the
// output occurrence to the input occurrence, free edges attach to boundary
// nodes. Deterministic; throws IllFormed on bad input.
std::string to_dot(const TensorExpr&);

}  // namespace bt
