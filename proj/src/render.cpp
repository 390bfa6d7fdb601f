#include "bt/render.hpp"

#include <map>
#include <string>
#include <variant>

#include "bt/syntax.hpp"
#include "bt/wellformed.hpp"

namespace bt {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Node ids holding the output / input occurrence of an edge name.
// Well-formedness caps each at one, so plain strings suffice.
struct Holders {
  std::string out, in;
};

void scan_edges(const EdgeTerm& items, const std::string& node,
                std::map<EdgeName, Holders>& holders) {
  for (const EdgeItem& item : items) {
    if (const auto* e = std::get_if<DirectedEdge>(&item.v)) {
      Holders& h = holders[e->name];
      (e->dir == Dir::Out ? h.out : h.in) = node;
    } else {
      scan_edges(std::get<Group>(item.v).body, node, holders);
    }
  }
}

void walk(const TensorExpr& t, int depth, int& node_id, int& cluster_id,
          std::string& out, std::map<EdgeName, Holders>& holders) {
  const std::string ind(2 * (depth + 1), ' ');
  for (const Factor& f : t.factors) {
    if (std::holds_alternative<Empty>(f.v)) continue;
    if (const auto* b = std::get_if<Box>(&f.v)) {
      out += ind + "subgraph " + quoted("cluster_" + std::to_string(cluster_id++)) + " {\n";
      out += ind + "  label=" + quoted(b->name) + ";\n";
      out += ind + "  style=dashed;\n";
      walk(b->body, depth + 1, node_id, cluster_id, out, holders);
      out += ind + "}\n";
    } else {
      const std::string id = "n" + std::to_string(node_id++);
      out += ind + quoted(id) + " [label=" + quoted(print(f)) + "];\n";
      if (const auto* g = std::get_if<Generator>(&f.v)) {
        scan_edges(g->edges, id, holders);
      } else {
        const IdWire& w = std::get<IdWire>(f.v);
        holders[w.out].out = id;
        holders[w.in].in = id;
      }
    }
  }
}

}  // namespace

std::string to_dot(const TensorExpr& t) {
  require_wellformed(t);
  std::string out = "digraph bt {\n";
  std::map<EdgeName, Holders> holders;
  int node_id = 0;
  int cluster_id = 0;
  walk(t, 0, node_id, cluster_id, out, holders);
  for (const auto& [name, h] : holders)
    if (h.out.empty() || h.in.empty())
      out += "  " + quoted("f_" + name) + " [label=" + quoted(name) +
             ", shape=plaintext];\n";
  for (const auto& [name, h] : holders) {
    if (!h.out.empty() && !h.in.empty())
      out += "  " + quoted(h.out) + " -> " + quoted(h.in) + " [label=" +
             quoted(name) + "];\n";
    else if (!h.out.empty())
      out += "  " + quoted(h.out) + " -> " + quoted("f_" + name) + ";\n";
    else
      out += "  " + quoted("f_" + name) + " -> " + quoted(h.in) + ";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace bt
