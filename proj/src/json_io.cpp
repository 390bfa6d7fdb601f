#include <json.hpp>

#include "bt/syntax.hpp"

namespace bt {

namespace {

using nlohmann::json;

json eterm_to_json(const EdgeTerm& et) {
  json arr = json::array();
  for (const EdgeItem& it : et) {
    if (const auto* e = std::get_if<DirectedEdge>(&it.v)) {
      arr.push_back({{"kind", "edge"},
                     {"dir", e->dir == Dir::Out ? "out" : "in"},
                     {"name", e->name}});
    } else {
      const Group& g = std::get<Group>(it.v);
      arr.push_back({{"kind", "group"},
                     {"dir", g.rot == Rot::CW ? "cw" : "acw"},
                     {"box", g.box},
                     {"body", eterm_to_json(g.body)}});
    }
  }
  return arr;
}

json tensor_to_json(const TensorExpr& t) {
  json factors = json::array();
  for (const Factor& f : t.factors) {
    if (std::holds_alternative<Empty>(f.v)) {
      factors.push_back({{"kind", "empty"}});
    } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
      factors.push_back({{"kind", "id"}, {"out", w->out}, {"in", w->in}});
    } else if (const auto* g = std::get_if<Generator>(&f.v)) {
      factors.push_back({{"kind", "gen"},
                         {"name", g->name},
                         {"edges", eterm_to_json(g->edges)}});
    } else {
      const Box& b = std::get<Box>(f.v);
      factors.push_back({{"kind", "box"},
                         {"name", b.name},
                         {"body", tensor_to_json(b.body)}});
    }
  }
  return json{{"factors", factors}};
}

[[noreturn]] void bad(const std::string& what) {
  throw BtError("json: " + what);
}

std::string get_str(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) bad(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

EdgeTerm eterm_from_json(const json& arr) {
  if (!arr.is_array()) bad("edge list must be an array");
  EdgeTerm et;
  for (const json& j : arr) {
    std::string kind = get_str(j, "kind");
    if (kind == "edge") {
      std::string dir = get_str(j, "dir");
      if (dir != "out" && dir != "in") bad("edge dir must be out|in");
      et.push_back(EdgeItem{
          DirectedEdge{dir == "out" ? Dir::Out : Dir::In, get_str(j, "name")}});
    } else if (kind == "group") {
      std::string dir = get_str(j, "dir");
      if (dir != "cw" && dir != "acw") bad("group dir must be cw|acw");
      if (!j.contains("body")) bad("group missing body");
      et.push_back(EdgeItem{Group{dir == "cw" ? Rot::CW : Rot::ACW,
                                  get_str(j, "box"),
                                  eterm_from_json(j["body"])}});
    } else {
      bad("unknown edge item kind '" + kind + "'");
    }
  }
  return et;
}

TensorExpr tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("factors") || !j["factors"].is_array())
    bad("tensor must be an object with a factors array");
  TensorExpr t;
  for (const json& f : j["factors"]) {
    std::string kind = get_str(f, "kind");
    if (kind == "empty") {
      t.factors.push_back(Factor{Empty{}});
    } else if (kind == "id") {
      t.factors.push_back(Factor{IdWire{get_str(f, "out"), get_str(f, "in")}});
    } else if (kind == "gen") {
      if (!f.contains("edges")) bad("gen missing edges");
      t.factors.push_back(Factor{
          Generator{get_str(f, "name"), eterm_from_json(f["edges"])}});
    } else if (kind == "box") {
      if (!f.contains("body")) bad("box missing body");
      t.factors.push_back(
          Factor{Box{get_str(f, "name"), tensor_from_json(f["body"])}});
    } else {
      bad("unknown factor kind '" + kind + "'");
    }
  }
  return t;
}

}  // namespace

std::string to_json(const TensorExpr& t) {
  json j{{"format", 1}, {"tensor", tensor_to_json(t)}};
  return j.dump();
}

TensorExpr from_json(const std::string& src) {
  json j = json::parse(src, nullptr, false);
  if (j.is_discarded()) bad("malformed document");
  if (!j.is_object() || j.value("format", 0) != 1) bad("expected format 1");
  if (!j.contains("tensor")) bad("missing tensor");
  return tensor_from_json(j["tensor"]);
}

}  // namespace bt
