#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace bt {

using EdgeName = std::string;
using BoxName = std::string;

enum class Dir { Out, In };  // +a is an output, -a is an input
enum class Rot { CW, ACW };  // [body>B is CW, <body]B is ACW

inline char dir_sign(Dir d) { return d == Dir::Out ? '+' : '-'; }
inline Dir flip(Dir d) { return d == Dir::Out ? Dir::In : Dir::Out; }
inline Rot flip(Rot r) { return r == Rot::CW ? Rot::ACW : Rot::CW; }

struct EdgeItem;
using EdgeTerm = std::vector<EdgeItem>;

struct DirectedEdge {
  Dir dir;
  EdgeName name;
  bool operator==(const DirectedEdge&) const = default;
};

struct Group {
  Rot rot;
  BoxName box;
  EdgeTerm body;
  bool operator==(const Group&) const;
};

struct EdgeItem {
  std::variant<DirectedEdge, Group> v;
  bool operator==(const EdgeItem&) const = default;
};

inline bool Group::operator==(const Group&) const = default;

struct Factor;

// Factors form a multiset: product order never matters for equivalence.
struct TensorExpr {
  std::vector<Factor> factors;
  bool operator==(const TensorExpr&) const;
};

struct Empty {
  bool operator==(const Empty&) const = default;
};

struct IdWire {
  EdgeName out, in;  // id{+out -in}
  bool operator==(const IdWire&) const = default;
};

struct Generator {
  std::string name;
  EdgeTerm edges;
  bool operator==(const Generator&) const = default;
};

struct Box {
  BoxName name;
  TensorExpr body;
  bool operator==(const Box&) const = default;
};

struct Factor {
  std::variant<Empty, IdWire, Generator, Box> v;
  bool operator==(const Factor&) const = default;
};

inline bool TensorExpr::operator==(const TensorExpr&) const = default;

struct Equation {
  TensorExpr lhs, rhs;
  bool operator==(const Equation&) const = default;
};

struct BtError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllFormed : BtError {
  using BtError::BtError;
};
struct UnknownBox : BtError {
  using BtError::BtError;
};
struct NameClash : BtError {
  using BtError::BtError;
};
struct NotFound : BtError {
  using BtError::BtError;
};
struct IncompleteInstantiation : BtError {
  using BtError::BtError;
};

// One directed-edge occurrence with its contexts, innermost first.
// ectx lists the groups it sits inside; nctx the box factors.
struct Occurrence {
  Dir dir;
  EdgeName name;
  std::vector<BoxName> ectx;
  std::vector<BoxName> nctx;
  std::vector<BoxName> ctx() const;  // ectx followed by nctx
};

std::vector<Occurrence> occurrences(const TensorExpr&);

struct EdgeUse {
  bool out = false, in = false;
};
// Which directions each edge name occurs with (id wires included).
std::map<EdgeName, EdgeUse> edge_uses(const TensorExpr&);

// Every directed-edge name, id wires included.
void collect_edge_names(const TensorExpr&, std::set<std::string>&);
// Every box name: box factors and group markers alike.
void collect_box_names(const TensorExpr&, std::set<std::string>&);
// Names of box factors only, outermost-to-innermost traversal order.
std::vector<BoxName> box_factor_names(const TensorExpr&);

// Applies name substitutions everywhere: directed edges and wire endpoints
// from emap, box factors and group markers from bmap. Missing keys are kept.
void substitute_names(TensorExpr&, const std::map<EdgeName, EdgeName>& emap,
                      const std::map<BoxName, BoxName>& bmap);
// Renames only the occurrences of one directed edge, e.g. -a but not +a.
void substitute_dir(TensorExpr&, Dir, const EdgeName& from, const EdgeName& to);

}  // namespace bt
