#pragma once

#include <string>
#include <variant>
#include <vector>

#include "bt/boxops.hpp"
#include "bt/term.hpp"
#include "bt/theory.hpp"

namespace bt {

struct FixedBoxViolation : BtError {
  using BtError::BtError;
};
struct ClaimMismatch : BtError {
  using BtError::BtError;
};
struct IllFormedResult : BtError {
  using BtError::BtError;
};
struct UnknownAxiom : BtError {
  using BtError::BtError;
};
struct UnknownStep : BtError {
  using BtError::BtError;
};

// The two sides of an equation must expose the same interface: the same
// free edges with the same directions and contexts, and the same boxes
// with the same nesting.
struct CompatReport {
  std::string mismatch;
  bool ok() const { return mismatch.empty(); }
};

CompatReport check_compatible(const TensorExpr& lhs, const TensorExpr& rhs);

// Interface renamings lift to equations directly.
Equation derive_rename(const Equation& eq, const EdgeName& from,
                       const EdgeName& to);
Equation derive_box_rename(const Equation& eq, const BoxName& from,
                           const BoxName& to);

// One specialization action applied to an axiom or lemma instance.
struct SpecAction {
  enum class Kind { RenameEdge, RenameBox, Op, Weaken };
  Kind kind;
  std::string from, to;  // renamings
  BoxOp op{};            // Kind::Op
  BoxName box;           // Kind::Weaken target
  TensorExpr with;       // Kind::Weaken payload
};

struct Justification {
  enum class Kind { Equiv, Inst, Prod, BoxIntro, Sym, Trans, Hyp };
  Kind kind;
  std::string ref, ref2;          // premise references
  std::vector<SpecAction> specs;  // Inst
  TensorExpr with;                // Prod
  BoxName box;                    // BoxIntro
};

struct ProofStep {
  std::string id;
  Equation claim;
  Justification just;
};

// Proves the goal closed under one box: the base block derives the killed
// goal, the step block derives the expanded goal with the goal itself as
// hypothesis and the box fixed.
struct InductionBlock {
  BoxName box;
  std::vector<ProofStep> base, step;
};

struct ProofItem {
  std::variant<ProofStep, InductionBlock> v;
};

struct TheoremDecl {
  std::string name;
  Equation claim;
  std::vector<ProofItem> items;
};

struct ProofScript {
  std::vector<TheoremDecl> theorems;
};

ProofScript parse_proof(const std::string& src);

struct StepVerdict {
  std::string id;
  bool ok = true;
  std::string message;
};

struct TheoremVerdict {
  std::string name;
  bool accepted = false;
  std::string summary;
  std::vector<StepVerdict> steps;
};

struct ProofReport {
  std::vector<TheoremVerdict> theorems;
  bool all_accepted() const;
};

// Checks every step of every theorem; never throws on a bad proof.  An
// accepted theorem is available as a lemma to the ones after it.
ProofReport check_proof(const Theory& thy, const ProofScript& script);

std::string to_string(const ProofReport& report);

}  // namespace bt
