#include "cft/will.hpp"

#include <algorithm>

namespace cft {

namespace {

std::size_t count(const OptRef& r) { return r ? 1 : 0; }

WillRef bp_ref(const RtBlueprint& bp, const Vertex& v) { return {v, bp.at(v).port}; }

OptRef bp_opt(const RtBlueprint& bp, const OptVertex& v) {
  if (!v) return std::nullopt;
  return bp_ref(bp, *v);
}

/// Reference to v in T_t tagged with its position port at its parent.
OptRef tree_ref(const Topology& t, const OptVertex& v) {
  if (!v) return std::nullopt;
  Position pos = t.position_of(*v);
  return WillRef{*v, pos.parent ? pos.port : PortNumber{0}};
}

OptRef tree_parent_ref(const Topology& t, const Vertex& v) {
  Position pos = t.position_of(v);
  if (!pos.parent) return std::nullopt;
  return WillRef{*pos.parent, pos.port};
}

}  // namespace

std::size_t Willportion::refs() const {
  return count(leaf_parent) + count(h_parent) + count(h_child[0]) + count(h_child[1]);
}

std::size_t LeafWill::refs() const {
  return 1 + count(upper) + count(lower) + count(t_parent) + count(t_child[0]) +
         count(t_child[1]);
}

std::size_t HeirBackup::refs() const {
  return 1 + count(parent) + (portion ? portion->refs() : 0) + count(h_parent) +
         count(h_child[0]) + count(h_child[1]);
}

std::size_t NodeState::refs() const {
  std::size_t k = count(parent) + count(heir) + count(h_parent) + count(h_child[0]) +
                  count(h_child[1]);
  if (portion) k += portion->refs();
  if (backup) k += backup->refs();
  for (const auto& w : held) k += w.refs();
  k += 2 + tz.heavy.size();
  return k;
}

WillMap initial_wills(const LabelledTree& t0) {
  WillMap wills;
  for (NodeId v = 1; v <= t0.n; ++v) {
    if (t0.children[v].empty()) continue;
    std::vector<ChildSlot> slots;
    for (std::size_t i = 0; i < t0.children[v].size(); ++i) {
      NodeId c = t0.children[v][i];
      slots.push_back({c, t0.tz[c].d, static_cast<PortNumber>(i + 1)});
    }
    wills.emplace(v, build_rt_blueprint(slots));
  }
  return wills;
}

OptRef will_parent_ref(const RtBlueprint& bp, const Vertex& v) {
  return bp_opt(bp, bp.at(v).parent);
}

Willportion project_portion(const RtBlueprint& bp, NodeId owner, NodeId rep) {
  Willportion wp;
  wp.owner = owner;
  wp.rep = rep;
  wp.port = bp.at(Vertex::real(rep)).port;
  wp.leaf_parent = will_parent_ref(bp, Vertex::real(rep));
  Vertex h = Vertex::helper_of(rep);
  if (bp.contains(h)) {
    const RtNode& n = bp.at(h);
    wp.has_helper = true;
    wp.h_parent = bp_opt(bp, n.parent);
    wp.h_child = {bp_opt(bp, n.child[0]), bp_opt(bp, n.child[1])};
    wp.h_range = n.range;
  }
  return wp;
}

RtBlueprint reconstruct_will(const std::vector<Willportion>& portions) {
  RtBlueprint bp;
  auto vert = [](const OptRef& r) -> OptVertex {
    if (!r) return std::nullopt;
    return r->v;
  };
  for (const auto& wp : portions) {
    RtNode& leaf = bp.insert(Vertex::real(wp.rep));
    leaf.port = wp.port;
    leaf.parent = vert(wp.leaf_parent);
    if (wp.has_helper) {
      Vertex hv = Vertex::helper_of(wp.rep);
      RtNode& h = bp.insert(hv);
      h.port = wp.port;
      h.parent = vert(wp.h_parent);
      h.child = {vert(wp.h_child[0]), vert(wp.h_child[1])};
      h.range = wp.h_range;
      if (!h.parent) bp.set_root(hv);
    }
  }
  for (const auto& [v, n] : bp.nodes()) {
    if (n.parent && !bp.contains(*n.parent)) {
      throw Error(ErrorCode::kInternal,
                  "portion references missing vertex " + to_string(*n.parent));
    }
  }
  return bp;
}

std::optional<HeldLeafWill> tree_leaf_will(const Topology& t, NodeId x) {
  const Vertex rx = Vertex::real(x);
  if (!t.contains(rx) || t.at(rx).child_count() != 0) return std::nullopt;
  const OptVertex q = t.at(rx).parent;
  if (!q || !q->helper) return std::nullopt;

  HeldLeafWill out;
  LeafWill& w = out.will;
  w.level = WillLevel::kTree;
  w.owner = x;
  w.bypassed = *q;
  const Vertex hx = Vertex::helper_of(x);
  if (*q == hx) {
    // Bypass of the owner's own helper: its parent and other child.
    OptVertex lower;
    for (const auto& c : t.at(*q).child) {
      if (c && *c != rx) lower = c;
    }
    if (!lower) return std::nullopt;
    w.upper = tree_parent_ref(t, *q);
    w.lower = WillRef{*lower, 0};
    out.heir = lower->host();
    return out;
  }
  // The parent's host bypasses its own helper; only the takeover is carried.
  out.heir = q->host();
  if (t.contains(hx)) {
    const TVertex& h = t.at(hx);
    w.takeover = true;
    w.t_parent = tree_parent_ref(t, hx);
    for (int s = 0; s < 2; ++s) {
      if (h.child[s]) w.t_child[s] = WillRef{*h.child[s], 0};
    }
    w.t_range = h.range;
  }
  return out;
}

std::optional<HeldLeafWill> will_leaf_will(const RtBlueprint& bp, NodeId owner,
                                           NodeId x) {
  const Vertex sx = Vertex::real(x);
  const OptVertex q = bp.at(sx).parent;
  if (!q || !q->helper) return std::nullopt;

  HeldLeafWill out;
  LeafWill& w = out.will;
  w.level = WillLevel::kWill;
  w.owner = x;
  w.will_owner = owner;
  w.bypassed = *q;
  const Vertex hx = Vertex::helper_of(x);
  if (*q == hx) {
    OptVertex lower;
    for (const auto& c : bp.at(*q).child) {
      if (c && *c != sx) lower = c;
    }
    if (!lower) return std::nullopt;
    w.upper = will_parent_ref(bp, *q);
    w.lower = bp_opt(bp, lower);
    out.heir = lower->host();
    return out;
  }
  out.heir = q->host();
  if (bp.contains(hx)) {
    const RtNode& h = bp.at(hx);
    w.takeover = true;
    w.t_parent = bp_opt(bp, h.parent);
    w.t_child = {bp_opt(bp, h.child[0]), bp_opt(bp, h.child[1])};
    w.t_range = h.range;
  }
  return out;
}

bool needs_will_leaf_will(const Topology& t, const RtBlueprint& bp, NodeId owner,
                          NodeId x) {
  const Vertex rx = Vertex::real(x);
  if (!t.contains(rx) || t.at(rx).child_count() != 0) return false;
  OptVertex slot = t.at_port(Vertex::real(owner), bp.at(rx).port);
  if (slot == rx) return true;
  if (slot == Vertex::helper_of(x)) {
    auto kids = t.children(*slot);
    return kids.size() == 1 && kids.front() == rx;
  }
  return false;
}

std::vector<NodeState> derive_states(const LabelledTree& t0, const Topology& t,
                                     const WillMap& wills) {
  std::vector<NodeState> st(t.n() + 1);
  for (NodeId v : t.live_nodes()) {
    NodeState& s = st[v];
    const Vertex rv = Vertex::real(v);
    const TVertex& tv = t.at(rv);
    s.parent = tree_parent_ref(t, rv);
    s.numchildren = tv.child_count();
    s.maxportnumber = static_cast<PortNumber>(tv.child.size());
    const Vertex hv = Vertex::helper_of(v);
    if (t.contains(hv)) {
      const TVertex& h = t.at(hv);
      s.has_helper = true;
      s.h_parent = tree_parent_ref(t, hv);
      s.h_child = {tree_ref(t, h.child[0]), tree_ref(t, h.child[1])};
      s.h_range = h.range;
    }
    s.tz = t0.tz[v];
    s.label = t0.label[v];
  }
  for (const auto& [p, bp] : wills) {
    if (bp.empty()) continue;
    st[p].heir = bp_ref(bp, Vertex::real(bp.heir()));
    for (NodeId r : bp.leaves_in_order()) st[r].portion = project_portion(bp, p, r);
  }
  for (const auto& [c, bp] : wills) {
    if (bp.empty()) continue;
    const NodeState& sc = st[c];
    HeirBackup b;
    b.of = c;
    b.parent = sc.parent;
    b.portion = sc.portion;
    b.has_helper = sc.has_helper;
    b.h_parent = sc.h_parent;
    b.h_child = sc.h_child;
    b.h_range = sc.h_range;
    st[bp.heir()].backup = b;
  }
  for (NodeId x : t.live_nodes()) {
    if (auto w = tree_leaf_will(t, x)) st[w->heir].held.push_back(w->will);
  }
  for (const auto& [p, bp] : wills) {
    for (NodeId r : bp.leaves_in_order()) {
      if (!needs_will_leaf_will(t, bp, p, r)) continue;
      if (auto w = will_leaf_will(bp, p, r)) st[w->heir].held.push_back(w->will);
    }
  }
  for (auto& s : st) {
    std::sort(s.held.begin(), s.held.end(), [](const LeafWill& a, const LeafWill& b) {
      return std::pair{a.level, a.owner} < std::pair{b.level, b.owner};
    });
  }
  return st;
}

}  // namespace cft
