#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bt/instantiate.hpp"
#include "bt/term.hpp"

namespace bt {

struct MissingAssignment : BtError {
  using BtError::BtError;
};
struct ArityMismatch : BtError {
  using BtError::BtError;
};

// Exact rational, always normalized: den > 0, gcd(|num|, den) = 1, zero
// is 0/1. Construct through rat() so the invariant holds.
struct Rat {
  long long num = 0, den = 1;
  bool operator==(const Rat&) const = default;
};
Rat rat(long long num, long long den = 1);
Rat operator+(Rat, Rat);
Rat operator*(Rat, Rat);
std::string to_string(const Rat&);

enum class Semiring { Int, Rat, Float };

// One '^' per output leg, one 'v' per input leg, in edgeterm order. The
// generator must be concrete.
std::string arity_word(const Generator&);

// A finite interpretation: every axis runs over 0..dim-1 and a generator's
// entries are keyed by (name, arity word), row-major in edgeterm order.
// Entries are exact rationals whatever the semiring; the semiring decides
// how evaluation converts and compares them.
struct Model {
  int dim = 1;
  Semiring semiring = Semiring::Int;
  double tol = 1e-9;  // float comparisons only
  std::map<std::pair<std::string, std::string>, std::vector<Rat>> gens;

  // data.size() must be dim^|word|.
  void assign(const std::string& gen, const std::string& word,
              std::vector<Rat> data);
};

using Scalar = std::variant<long long, Rat, double>;
std::string to_string(const Scalar&);

struct TensorValue {
  int dim = 1;
  std::vector<EdgeName> axes;  // the free edges, sorted by name
  std::vector<Scalar> data;    // row-major over axes
};

// The term must be concrete and well formed. Bound names contract away,
// free names become axes.
TensorValue evaluate(const TensorExpr&, const Model&);

struct InstanceFailure {
  Instantiation steps;
  Equation instance;
  std::string detail;
};

struct InstanceReport {
  int checked = 0;
  std::vector<InstanceFailure> failures;
  bool ok() const { return failures.empty(); }
};

// Evaluates both sides of every instance reachable within the bound,
// deduplicated up to renaming of the fresh frees, and collects mismatches.
// Evaluation errors on an instance count as failures, not exceptions.
InstanceReport check_equation_instances(const Equation&, const Model&,
                                        InstanceBound);

// dim k^2 over the integers: m multiplies matrix units, u is the identity,
// t transposes, s is the n-ary product folded left from u (n up to 8).
Model builtin_matrix_algebra_model(int k);
// dim k commutative counterpoint with the same signature.
Model builtin_diagonal_model(int k);

Model parse_model(const std::string& src);

}  // namespace bt
