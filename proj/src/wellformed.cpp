#include "bt/wellformed.hpp"

#include <algorithm>
#include <map>

namespace bt {

std::string to_string(const Violation& v) {
  std::string s = v.rule + " violation on " + v.subject;
  if (!v.detail.empty()) s += ": " + v.detail;
  return s;
}

namespace {

bool starts_with(const std::vector<BoxName>& v, const std::vector<BoxName>& p) {
  return v.size() >= p.size() && std::equal(p.begin(), p.end(), v.begin());
}

std::vector<BoxName> concat(const std::vector<BoxName>& a,
                            const std::vector<BoxName>& b) {
  std::vector<BoxName> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void walk_boxes(const TensorExpr& t, std::vector<BoxName>& chain,
                std::map<BoxName, std::vector<BoxName>>& out) {
  for (const Factor& f : t.factors) {
    if (const auto* b = std::get_if<Box>(&f.v)) {
      out.emplace(b->name,
                  std::vector<BoxName>(chain.rbegin(), chain.rend()));
      chain.push_back(b->name);
      walk_boxes(b->body, chain, out);
      chain.pop_back();
    }
  }
}

}  // namespace

std::optional<std::pair<std::vector<BoxName>, std::vector<BoxName>>>
find_context_witness(const std::vector<BoxName>& ectx_out,
                     const std::vector<BoxName>& nctx_out,
                     const std::vector<BoxName>& ectx_in,
                     const std::vector<BoxName>& nctx_in) {
  auto try_es = [&](const std::vector<BoxName>& es)
      -> std::optional<std::pair<std::vector<BoxName>, std::vector<BoxName>>> {
    std::vector<BoxName> lhs2 = concat(es, nctx_in);
    if (!starts_with(lhs2, ectx_out)) return std::nullopt;
    std::vector<BoxName> bs(lhs2.begin() + ectx_out.size(), lhs2.end());
    if (concat(es, nctx_out) != concat(ectx_in, bs)) return std::nullopt;
    return std::make_pair(es, bs);
  };
  for (size_t n = 0; n <= ectx_out.size(); ++n)
    if (auto w = try_es({ectx_out.begin(), ectx_out.begin() + n})) return w;
  for (size_t n = 0; n <= ectx_in.size(); ++n)
    if (auto w = try_es({ectx_in.begin(), ectx_in.begin() + n})) return w;
  return std::nullopt;
}

WfReport check_wellformed(const TensorExpr& t) {
  WfReport r;
  auto occs = occurrences(t);

  // F1: each directed edge occurs at most once
  std::map<EdgeName, std::pair<int, int>> counts;
  for (const Occurrence& o : occs)
    ++(o.dir == Dir::Out ? counts[o.name].first : counts[o.name].second);
  for (const auto& [name, c] : counts) {
    if (c.first > 1)
      r.violations.push_back({"F1", name, "+" + name + " occurs " +
                                              std::to_string(c.first) +
                                              " times"});
    if (c.second > 1)
      r.violations.push_back({"F1", name, "-" + name + " occurs " +
                                              std::to_string(c.second) +
                                              " times"});
  }

  // F2: box factor names are unique
  auto boxes = box_factor_names(t);
  std::sort(boxes.begin(), boxes.end());
  for (size_t i = 0; i + 1 < boxes.size(); ++i)
    if (boxes[i] == boxes[i + 1] && (i == 0 || boxes[i - 1] != boxes[i]))
      r.violations.push_back({"F2", boxes[i], "duplicate box factor"});

  std::map<BoxName, std::vector<BoxName>> box_nctx;
  std::vector<BoxName> chain;
  walk_boxes(t, chain, box_nctx);

  for (const Occurrence& o : occs) {
    // C1: an occurrence cannot sit both in a group for B and inside box B
    bool c1 = false;
    for (const BoxName& b : o.ectx)
      if (std::find(o.nctx.begin(), o.nctx.end(), b) != o.nctx.end())
        c1 = true;
    if (c1) {
      std::string sign(1, dir_sign(o.dir));
      r.violations.push_back(
          {"C1", o.name, sign + o.name + " sits in a group and a box for the same name"});
    }

    // C2: the innermost group marker must name a box whose own box context
    // continues this occurrence's context chain exactly. That pins every
    // outer marker too, since the box's context lists all of them.
    if (!o.ectx.empty()) {
      const BoxName& e1 = o.ectx.front();
      std::vector<BoxName> rest(o.ectx.begin() + 1, o.ectx.end());
      rest.insert(rest.end(), o.nctx.begin(), o.nctx.end());
      auto it = box_nctx.find(e1);
      std::string sign(1, dir_sign(o.dir));
      if (it == box_nctx.end()) {
        r.violations.push_back(
            {"C2", o.name, "group marker " + e1 + " on " + sign + o.name +
                               " has no box factor"});
      } else if (it->second != rest) {
        r.violations.push_back(
            {"C2", o.name, "group marker " + e1 + " on " + sign + o.name +
                               " is not anchored to box " + e1});
      }
    }
  }

  // C3: bound pairs need a context witness
  std::map<EdgeName, std::pair<const Occurrence*, const Occurrence*>> pairs;
  for (const Occurrence& o : occs) {
    auto& p = pairs[o.name];
    (o.dir == Dir::Out ? p.first : p.second) = &o;
  }
  for (const auto& [name, p] : pairs) {
    const auto& c = counts[name];
    if (c.first != 1 || c.second != 1) continue;  // free, or already an F1
    auto w = find_context_witness(p.first->ectx, p.first->nctx,
                                  p.second->ectx, p.second->nctx);
    if (w)
      r.witnesses.push_back({name, w->first, w->second});
    else
      r.violations.push_back({"C3", name, "no context witness for the bound pair"});
  }

  return r;
}

bool is_wellformed(const TensorExpr& t) {
  return check_wellformed(t).ok();
}

void require_wellformed(const TensorExpr& t, const std::string& what) {
  WfReport r = check_wellformed(t);
  if (r.ok()) return;
  std::string msg = what + " is not well-formed";
  for (const Violation& v : r.violations) msg += "; " + to_string(v);
  throw IllFormed(msg);
}

}  // namespace bt
