#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bt/term.hpp"

namespace bt {

// Deterministic fresh-name supply. fr(x) strips one numeric suffix off x
// and yields base.k for the smallest unused k >= 1. Memoized, so one
// source name maps to one fresh name for the lifetime of the supply.
class FreshNames {
 public:
  FreshNames() = default;
  explicit FreshNames(const TensorExpr& scope) { add_scope(scope); }
  FreshNames(const TensorExpr& a, const TensorExpr& b) {
    add_scope(a);
    add_scope(b);
  }
  void add_scope(const TensorExpr&);

  // Pin a mapping up front, e.g. force fr(A) = B. The target is reserved.
  void override_edge(const EdgeName& from, const EdgeName& to);
  void override_box(const BoxName& from, const BoxName& to);

  // Take a name out of circulation without pinning anything to it.
  void reserve_edge(const EdgeName& n) { used_edges_.insert(n); }
  void reserve_box(const BoxName& n) { used_boxes_.insert(n); }

  EdgeName edge(const EdgeName&);
  BoxName box(const BoxName&);

  const std::map<EdgeName, EdgeName>& edge_map() const { return emap_; }
  const std::map<BoxName, BoxName>& box_map() const { return bmap_; }

 private:
  std::string alloc(const std::string& name, std::set<std::string>& used);
  std::set<std::string> used_edges_, used_boxes_;
  std::map<EdgeName, EdgeName> emap_;
  std::map<BoxName, BoxName> bmap_;
};

// Copy with every name freshened: edges, wires, box factors, group markers.
// Generator names are signature symbols and stay.
TensorExpr fresh_copy(const TensorExpr&, FreshNames&);

// The four box operations. The target must occur as a box factor or group
// marker, else UnknownBox. Results keep the original factors in place;
// expansion and drop splice copies beside them and prune stray units.
TensorExpr op_exp(const TensorExpr&, const BoxName&, FreshNames&);
TensorExpr op_copy(const TensorExpr&, const BoxName&, FreshNames&);
TensorExpr op_kill(const TensorExpr&, const BoxName&);
TensorExpr op_drop(const TensorExpr&, const BoxName&);

enum class OpKind { Exp, Kill, Copy, Drop };

struct BoxOp {
  OpKind kind;
  BoxName box;
  bool operator==(const BoxOp&) const = default;
};

std::string to_string(const BoxOp&);

// Applies one operation (or a sequence) with a fresh supply per step.
TensorExpr apply(const TensorExpr&, const BoxOp&);
TensorExpr apply(const TensorExpr&, const std::vector<BoxOp>&);
// On an equation the supply is shared across both sides, so matching
// names receive matching fresh names.
Equation apply(const Equation&, const BoxOp&);
Equation apply(const Equation&, const std::vector<BoxOp>&);

// Appends K's factors to the body of box A. Well-formedness of the result
// is the caller's concern.
TensorExpr weaken(const TensorExpr&, const BoxName& target, const TensorExpr& K);

// `from` must be a free edge and `to` entirely unused.
TensorExpr rename_edge(const TensorExpr&, const EdgeName& from, const EdgeName& to);
// `from` must occur as a box name and `to` must be unused.
TensorExpr rename_box(const TensorExpr&, const BoxName& from, const BoxName& to);

}  // namespace bt
