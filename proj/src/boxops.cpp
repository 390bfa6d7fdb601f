#include "bt/boxops.hpp"

#include <algorithm>
#include <cctype>

namespace bt {

void FreshNames::add_scope(const TensorExpr& t) {
  collect_edge_names(t, used_edges_);
  collect_box_names(t, used_boxes_);
}

void FreshNames::override_edge(const EdgeName& from, const EdgeName& to) {
  emap_[from] = to;
  used_edges_.insert(to);
}

void FreshNames::override_box(const BoxName& from, const BoxName& to) {
  bmap_[from] = to;
  used_boxes_.insert(to);
}

namespace {

std::string base_of(const std::string& name) {
  size_t pos = name.rfind('.');
  if (pos == std::string::npos || pos == 0 || pos + 1 == name.size())
    return name;
  for (size_t i = pos + 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return name;
  return name.substr(0, pos);
}

}  // namespace

std::string FreshNames::alloc(const std::string& name,
                              std::set<std::string>& used) {
  std::string base = base_of(name);
  for (int k = 1;; ++k) {
    std::string cand = base + "." + std::to_string(k);
    if (used.insert(cand).second) return cand;
  }
}

EdgeName FreshNames::edge(const EdgeName& n) {
  auto it = emap_.find(n);
  if (it != emap_.end()) return it->second;
  return emap_[n] = alloc(n, used_edges_);
}

BoxName FreshNames::box(const BoxName& n) {
  auto it = bmap_.find(n);
  if (it != bmap_.end()) return it->second;
  return bmap_[n] = alloc(n, used_boxes_);
}

namespace {

EdgeTerm fresh_eterm(const EdgeTerm& et, FreshNames& fr) {
  EdgeTerm out;
  for (const EdgeItem& it : et) {
    if (const auto* e = std::get_if<DirectedEdge>(&it.v))
      out.push_back(EdgeItem{DirectedEdge{e->dir, fr.edge(e->name)}});
    else {
      const Group& g = std::get<Group>(it.v);
      out.push_back(EdgeItem{Group{g.rot, fr.box(g.box), fresh_eterm(g.body, fr)}});
    }
  }
  return out;
}

TensorExpr fresh_tensor(const TensorExpr& t, FreshNames& fr) {
  TensorExpr out;
  for (const Factor& f : t.factors) {
    if (std::holds_alternative<Empty>(f.v)) {
      out.factors.push_back(f);
    } else if (const auto* w = std::get_if<IdWire>(&f.v)) {
      out.factors.push_back(Factor{IdWire{fr.edge(w->out), fr.edge(w->in)}});
    } else if (const auto* g = std::get_if<Generator>(&f.v)) {
      out.factors.push_back(Factor{Generator{g->name, fresh_eterm(g->edges, fr)}});
    } else {
      const Box& b = std::get<Box>(f.v);
      out.factors.push_back(Factor{Box{fr.box(b.name), fresh_tensor(b.body, fr)}});
    }
  }
  return out;
}

void splice_pruned(TensorExpr& dst, TensorExpr src) {
  for (Factor& f : src.factors)
    if (!std::holds_alternative<Empty>(f.v))
      dst.factors.push_back(std::move(f));
}

void splice_pruned(EdgeTerm& dst, EdgeTerm src) {
  for (EdgeItem& it : src) dst.push_back(std::move(it));
}

// One recursive skeleton for all four operations: `hit` decides what a
// factor-level or item-level occurrence of the target turns into.
struct OpWalk {
  const BoxName& target;
  bool found = false;

  explicit OpWalk(const BoxName& t) : target(t) {}
  virtual void box_hit(const Box&, TensorExpr& out) = 0;
  virtual void group_hit(const Group&, EdgeTerm& out) = 0;
  virtual ~OpWalk() = default;

  EdgeTerm eterm(const EdgeTerm& et) {
    EdgeTerm out;
    for (const EdgeItem& it : et) {
      if (const auto* g = std::get_if<Group>(&it.v)) {
        if (g->box == target) {
          found = true;
          group_hit(*g, out);
        } else {
          out.push_back(EdgeItem{Group{g->rot, g->box, eterm(g->body)}});
        }
      } else {
        out.push_back(it);
      }
    }
    return out;
  }

  TensorExpr tensor(const TensorExpr& t) {
    TensorExpr out;
    for (const Factor& f : t.factors) {
      if (const auto* b = std::get_if<Box>(&f.v)) {
        if (b->name == target) {
          found = true;
          box_hit(*b, out);
        } else {
          out.factors.push_back(Factor{Box{b->name, tensor(b->body)}});
        }
      } else if (const auto* g = std::get_if<Generator>(&f.v)) {
        out.factors.push_back(Factor{Generator{g->name, eterm(g->edges)}});
      } else {
        out.factors.push_back(f);
      }
    }
    return out;
  }

  TensorExpr run(const TensorExpr& t) {
    TensorExpr out = tensor(t);
    if (!found) throw UnknownBox("no box named " + target);
    return out;
  }
};

struct ExpWalk : OpWalk {
  FreshNames& fr;
  ExpWalk(const BoxName& b, FreshNames& f) : OpWalk{b}, fr(f) {}
  void box_hit(const Box& b, TensorExpr& out) override {
    out.factors.push_back(Factor{b});
    splice_pruned(out, fresh_tensor(b.body, fr));
  }
  void group_hit(const Group& g, EdgeTerm& out) override {
    if (g.rot == Rot::CW) {
      out.push_back(EdgeItem{g});
      splice_pruned(out, fresh_eterm(g.body, fr));
    } else {
      splice_pruned(out, fresh_eterm(g.body, fr));
      out.push_back(EdgeItem{g});
    }
  }
};

struct CopyWalk : OpWalk {
  FreshNames& fr;
  CopyWalk(const BoxName& b, FreshNames& f) : OpWalk{b}, fr(f) {}
  void box_hit(const Box& b, TensorExpr& out) override {
    out.factors.push_back(Factor{b});
    out.factors.push_back(Factor{Box{fr.box(b.name), fresh_tensor(b.body, fr)}});
  }
  void group_hit(const Group& g, EdgeTerm& out) override {
    Group copy{g.rot, fr.box(g.box), fresh_eterm(g.body, fr)};
    if (g.rot == Rot::CW) {
      out.push_back(EdgeItem{g});
      out.push_back(EdgeItem{std::move(copy)});
    } else {
      out.push_back(EdgeItem{std::move(copy)});
      out.push_back(EdgeItem{g});
    }
  }
};

struct KillWalk : OpWalk {
  explicit KillWalk(const BoxName& b) : OpWalk{b} {}
  void box_hit(const Box&, TensorExpr&) override {}
  void group_hit(const Group&, EdgeTerm&) override {}
};

struct DropWalk : OpWalk {
  explicit DropWalk(const BoxName& b) : OpWalk{b} {}
  void box_hit(const Box& b, TensorExpr& out) override {
    splice_pruned(out, tensor(b.body));
  }
  void group_hit(const Group& g, EdgeTerm& out) override {
    splice_pruned(out, eterm(g.body));
  }
};

}  // namespace

TensorExpr fresh_copy(const TensorExpr& t, FreshNames& fr) {
  return fresh_tensor(t, fr);
}

TensorExpr op_exp(const TensorExpr& t, const BoxName& b, FreshNames& fr) {
  return ExpWalk(b, fr).run(t);
}

TensorExpr op_copy(const TensorExpr& t, const BoxName& b, FreshNames& fr) {
  return CopyWalk(b, fr).run(t);
}

TensorExpr op_kill(const TensorExpr& t, const BoxName& b) {
  return KillWalk(b).run(t);
}

TensorExpr op_drop(const TensorExpr& t, const BoxName& b) {
  return DropWalk(b).run(t);
}

std::string to_string(const BoxOp& op) {
  switch (op.kind) {
    case OpKind::Exp: return "exp " + op.box;
    case OpKind::Kill: return "kill " + op.box;
    case OpKind::Copy: return "copy " + op.box;
    case OpKind::Drop: return "drop " + op.box;
  }
  return "?";
}

TensorExpr apply(const TensorExpr& t, const BoxOp& op) {
  FreshNames fr(t);
  switch (op.kind) {
    case OpKind::Exp: return op_exp(t, op.box, fr);
    case OpKind::Kill: return op_kill(t, op.box);
    case OpKind::Copy: return op_copy(t, op.box, fr);
    case OpKind::Drop: return op_drop(t, op.box);
  }
  throw BtError("bad op");
}

TensorExpr apply(const TensorExpr& t, const std::vector<BoxOp>& ops) {
  TensorExpr cur = t;
  for (const BoxOp& op : ops) cur = apply(cur, op);
  return cur;
}

Equation apply(const Equation& eq, const BoxOp& op) {
  FreshNames fr(eq.lhs, eq.rhs);
  switch (op.kind) {
    case OpKind::Exp:
      return {op_exp(eq.lhs, op.box, fr), op_exp(eq.rhs, op.box, fr)};
    case OpKind::Kill:
      return {op_kill(eq.lhs, op.box), op_kill(eq.rhs, op.box)};
    case OpKind::Copy:
      return {op_copy(eq.lhs, op.box, fr), op_copy(eq.rhs, op.box, fr)};
    case OpKind::Drop:
      return {op_drop(eq.lhs, op.box), op_drop(eq.rhs, op.box)};
  }
  throw BtError("bad op");
}

Equation apply(const Equation& eq, const std::vector<BoxOp>& ops) {
  Equation cur = eq;
  for (const BoxOp& op : ops) cur = apply(cur, op);
  return cur;
}

namespace {

bool weaken_into(TensorExpr& t, const BoxName& target, const TensorExpr& k) {
  for (Factor& f : t.factors) {
    if (auto* b = std::get_if<Box>(&f.v)) {
      if (b->name == target) {
        bool adds = false;
        for (const Factor& kf : k.factors)
          if (!std::holds_alternative<Empty>(kf.v)) adds = true;
        if (adds)
          std::erase_if(b->body.factors, [](const Factor& bf) {
            return std::holds_alternative<Empty>(bf.v);
          });
        for (const Factor& kf : k.factors)
          if (!std::holds_alternative<Empty>(kf.v)) b->body.factors.push_back(kf);
        return true;
      }
      if (weaken_into(b->body, target, k)) return true;
    }
  }
  return false;
}

}  // namespace

TensorExpr weaken(const TensorExpr& t, const BoxName& target,
                  const TensorExpr& k) {
  TensorExpr out = t;
  if (!weaken_into(out, target, k)) throw UnknownBox("no box named " + target);
  return out;
}

TensorExpr rename_edge(const TensorExpr& t, const EdgeName& from,
                       const EdgeName& to) {
  auto uses = edge_uses(t);
  auto it = uses.find(from);
  if (it == uses.end()) throw NotFound("no edge named " + from);
  if (it->second.out && it->second.in)
    throw NameClash("edge " + from + " is bound");
  if (uses.count(to)) throw NameClash("edge name " + to + " is already in use");
  TensorExpr out = t;
  substitute_names(out, {{from, to}}, {});
  return out;
}

TensorExpr rename_box(const TensorExpr& t, const BoxName& from,
                      const BoxName& to) {
  std::set<std::string> boxes;
  collect_box_names(t, boxes);
  if (!boxes.count(from)) throw NotFound("no box named " + from);
  if (boxes.count(to)) throw NameClash("box name " + to + " is already in use");
  TensorExpr out = t;
  substitute_names(out, {}, {{from, to}});
  return out;
}

}  // namespace bt
