#include "bt/term.hpp"

#include <algorithm>

namespace bt {

std::vector<BoxName> Occurrence::ctx() const {
  std::vector<BoxName> out = ectx;
  out.insert(out.end(), nctx.begin(), nctx.end());
  return out;
}

namespace {

// Walks with outermost-first accumulators, reverses on emission.
struct OccWalk {
  std::vector<Occurrence> out;

  void edge(Dir d, const EdgeName& n, const std::vector<BoxName>& ectx,
            const std::vector<BoxName>& nctx) {
    Occurrence o;
    o.dir = d;
    o.name = n;
    o.ectx.assign(ectx.rbegin(), ectx.rend());
    o.nctx.assign(nctx.rbegin(), nctx.rend());
    out.push_back(std::move(o));
  }

  void eterm(const EdgeTerm& et, std::vector<BoxName>& ectx,
             const std::vector<BoxName>& nctx) {
    for (const EdgeItem& it : et) {
      if (const auto* e = std::get_if<DirectedEdge>(&it.v)) {
        edge(e->dir, e->name, ectx, nctx);
      } else {
        const Group& g = std::get<Group>(it.v);
        ectx.push_back(g.box);
        eterm(g.body, ectx, nctx);
        ectx.pop_back();
      }
    }
  }

  void tensor(const TensorExpr& t, std::vector<BoxName>& nctx) {
    std::vector<BoxName> ectx;
    for (const Factor& f : t.factors) {
      if (const auto* w = std::get_if<IdWire>(&f.v)) {
        edge(Dir::Out, w->out, ectx, nctx);
        edge(Dir::In, w->in, ectx, nctx);
      } else if (const auto* g = std::get_if<Generator>(&f.v)) {
        eterm(g->edges, ectx, nctx);
      } else if (const auto* b = std::get_if<Box>(&f.v)) {
        nctx.push_back(b->name);
        tensor(b->body, nctx);
        nctx.pop_back();
      }
    }
  }
};

}  // namespace

std::vector<Occurrence> occurrences(const TensorExpr& t) {
  OccWalk w;
  std::vector<BoxName> nctx;
  w.tensor(t, nctx);
  return w.out;
}

std::map<EdgeName, EdgeUse> edge_uses(const TensorExpr& t) {
  std::map<EdgeName, EdgeUse> uses;
  for (const Occurrence& o : occurrences(t)) {
    EdgeUse& u = uses[o.name];
    (o.dir == Dir::Out ? u.out : u.in) = true;
  }
  return uses;
}

void collect_edge_names(const TensorExpr& t, std::set<std::string>& out) {
  for (const Occurrence& o : occurrences(t)) out.insert(o.name);
}

namespace {

void box_names_in_eterm(const EdgeTerm& et, std::set<std::string>& out) {
  for (const EdgeItem& it : et) {
    if (const auto* g = std::get_if<Group>(&it.v)) {
      out.insert(g->box);
      box_names_in_eterm(g->body, out);
    }
  }
}

}  // namespace

void collect_box_names(const TensorExpr& t, std::set<std::string>& out) {
  for (const Factor& f : t.factors) {
    if (const auto* g = std::get_if<Generator>(&f.v)) {
      box_names_in_eterm(g->edges, out);
    } else if (const auto* b = std::get_if<Box>(&f.v)) {
      out.insert(b->name);
      collect_box_names(b->body, out);
    }
  }
}

namespace {

template <class EdgeFn, class BoxFn>
void subst_eterm(EdgeTerm& et, EdgeFn edge, BoxFn box) {
  for (EdgeItem& it : et) {
    if (auto* e = std::get_if<DirectedEdge>(&it.v)) {
      edge(e->dir, e->name);
    } else {
      Group& g = std::get<Group>(it.v);
      box(g.box);
      subst_eterm(g.body, edge, box);
    }
  }
}

template <class EdgeFn, class BoxFn>
void subst_tensor(TensorExpr& t, EdgeFn edge, BoxFn box) {
  for (Factor& f : t.factors) {
    if (auto* w = std::get_if<IdWire>(&f.v)) {
      edge(Dir::Out, w->out);
      edge(Dir::In, w->in);
    } else if (auto* g = std::get_if<Generator>(&f.v)) {
      subst_eterm(g->edges, edge, box);
    } else if (auto* b = std::get_if<Box>(&f.v)) {
      box(b->name);
      subst_tensor(b->body, edge, box);
    }
  }
}

}  // namespace

void substitute_names(TensorExpr& t, const std::map<EdgeName, EdgeName>& emap,
                      const std::map<BoxName, BoxName>& bmap) {
  subst_tensor(
      t,
      [&](Dir, EdgeName& n) {
        if (auto it = emap.find(n); it != emap.end()) n = it->second;
      },
      [&](BoxName& n) {
        if (auto it = bmap.find(n); it != bmap.end()) n = it->second;
      });
}

void substitute_dir(TensorExpr& t, Dir d, const EdgeName& from,
                    const EdgeName& to) {
  subst_tensor(
      t,
      [&](Dir dd, EdgeName& n) {
        if (dd == d && n == from) n = to;
      },
      [](BoxName&) {});
}

std::vector<BoxName> box_factor_names(const TensorExpr& t) {
  std::vector<BoxName> out;
  for (const Factor& f : t.factors) {
    if (const auto* b = std::get_if<Box>(&f.v)) {
      out.push_back(b->name);
      auto inner = box_factor_names(b->body);
      out.insert(out.end(), inner.begin(), inner.end());
    }
  }
  return out;
}

}  // namespace bt
