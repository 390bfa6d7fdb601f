#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bt/term.hpp"

namespace bt {

struct Violation {
  std::string rule;     // F1, F2, C1, C2, C3
  std::string subject;  // offending edge or box name
  std::string detail;
};

std::string to_string(const Violation&);

// Witness for the binding condition on one bound pair: es and bs satisfy
//   es ++ nctx(+a) == ectx(-a) ++ bs   and   es ++ nctx(-a) == ectx(+a) ++ bs
struct BoundWitness {
  EdgeName name;
  std::vector<BoxName> es, bs;
};

struct WfReport {
  std::vector<Violation> violations;
  std::vector<BoundWitness> witnesses;  // one per bound pair, name order
  bool ok() const { return violations.empty(); }
};

WfReport check_wellformed(const TensorExpr&);
bool is_wellformed(const TensorExpr&);
// Throws IllFormed listing the violations; `what` prefixes the message.
void require_wellformed(const TensorExpr&, const std::string& what = "term");

// Witness search on a raw context quadruple. Candidate prefixes of either
// ectx suffice: bs is forced by the second equation once es is chosen.
std::optional<std::pair<std::vector<BoxName>, std::vector<BoxName>>>
find_context_witness(const std::vector<BoxName>& ectx_out,
                     const std::vector<BoxName>& nctx_out,
                     const std::vector<BoxName>& ectx_in,
                     const std::vector<BoxName>& nctx_in);

}  // namespace bt
