#include "cft/blueprint.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace cft {

std::size_t ceil_log2(std::size_t x) {
  std::size_t r = 0;
  while ((std::size_t{1} << r) < x) ++r;
  return r;
}

const RtNode& RtBlueprint::at(const Vertex& v) const {
  auto it = nodes_.find(v);
  if (it == nodes_.end()) {
    throw Error(ErrorCode::kInternal, "blueprint has no vertex " + to_string(v));
  }
  return it->second;
}

RtNode& RtBlueprint::at(const Vertex& v) {
  return const_cast<RtNode&>(std::as_const(*this).at(v));
}

std::vector<NodeId> RtBlueprint::leaves_in_order() const {
  std::vector<NodeId> out;
  std::function<void(const Vertex&)> walk = [&](const Vertex& v) {
    const RtNode& n = at(v);
    if (!v.helper) out.push_back(v.id);
    for (const auto& c : n.child) {
      if (c) walk(*c);
    }
  };
  if (root_) walk(*root_);
  return out;
}

std::size_t RtBlueprint::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const auto& kv) { return !kv.first.helper; }));
}

std::size_t RtBlueprint::helper_count() const { return nodes_.size() - leaf_count(); }

std::size_t RtBlueprint::depth() const {
  std::function<std::size_t(const Vertex&)> rec = [&](const Vertex& v) -> std::size_t {
    std::size_t best = 0;
    for (const auto& c : at(v).child) {
      if (c) best = std::max(best, 1 + rec(*c));
    }
    return best;
  };
  return root_ ? rec(*root_) : 0;
}

std::optional<int> RtBlueprint::side_of(const Vertex& v) const {
  const RtNode& n = at(v);
  if (!n.parent) return std::nullopt;
  const RtNode& p = at(*n.parent);
  for (int s = 0; s < 2; ++s) {
    if (p.child[s] == v) return s;
  }
  throw Error(ErrorCode::kInternal, "asymmetric link at " + to_string(v));
}

void RtBlueprint::replace_child(OptVertex parent, const Vertex& old, OptVertex repl) {
  if (!parent) {
    root_ = repl;
  } else {
    RtNode& p = at(*parent);
    bool found = false;
    for (auto& c : p.child) {
      if (c == old) {
        c = repl;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kInternal,
                  to_string(old) + " is not a child of " + to_string(*parent));
    }
    // Keep a lone child on the left.
    if (!p.child[0] && p.child[1]) std::swap(p.child[0], p.child[1]);
  }
  if (repl) at(*repl).parent = parent;
}

void RtBlueprint::rename(NodeId from, NodeId to) {
  if (from == to) return;
  for (bool helper : {false, true}) {
    Vertex old{from, helper};
    Vertex now{to, helper};
    auto it = nodes_.find(old);
    if (it == nodes_.end()) continue;
    if (nodes_.count(now)) {
      throw Error(ErrorCode::kInternal, "rename target exists: " + to_string(now));
    }
    RtNode node = it->second;
    nodes_.erase(it);
    nodes_[now] = node;
  }
  auto fix = [&](OptVertex& ref) {
    if (ref && ref->id == from) ref->id = to;
  };
  for (auto& [v, n] : nodes_) {
    fix(n.parent);
    fix(n.child[0]);
    fix(n.child[1]);
  }
  fix(root_);
}

LeafRemoval RtBlueprint::remove_leaf(NodeId x) {
  const Vertex leaf = Vertex::real(x);
  const RtNode& ln = at(leaf);
  if (!ln.parent || !ln.parent->helper) {
    throw Error(ErrorCode::kPreconditionViolated,
                "leaf " + std::to_string(x) + " has no helper parent");
  }
  LeafRemoval r;
  r.leaf = leaf;
  r.bypassed = *ln.parent;
  RtNode q = at(r.bypassed);
  r.upper = q.parent;
  for (const auto& c : q.child) {
    if (c && *c != leaf) r.lower = c;
  }
  nodes_.erase(leaf);
  nodes_.erase(r.bypassed);
  replace_child(r.upper, r.bypassed, r.lower);

  const Vertex hx = Vertex::helper_of(x);
  if (r.bypassed != hx && nodes_.count(hx)) {
    const Vertex succ = Vertex::helper_of(r.bypassed.host());
    r.taken_over = hx;
    r.successor = succ;
    RtNode moved = at(hx);
    moved.port = at(Vertex::real(succ.id)).port;
    nodes_.erase(hx);
    nodes_[succ] = moved;
    auto fix = [&](OptVertex& ref) {
      if (ref == hx) ref = succ;
    };
    for (auto& [v, n] : nodes_) {
      fix(n.parent);
      fix(n.child[0]);
      fix(n.child[1]);
    }
    fix(root_);
    if (r.upper == hx) r.upper = succ;
  }
  return r;
}

std::string RtBlueprint::validate() const {
  std::ostringstream err;
  if (!root_) {
    if (!nodes_.empty()) err << "vertices without root";
    return err.str();
  }
  if (at(*root_).parent) err << "root has parent; ";
  std::size_t seen = 0;
  std::function<std::pair<NodeId, NodeId>(const Vertex&)> rec =
      [&](const Vertex& v) -> std::pair<NodeId, NodeId> {
    ++seen;
    const RtNode& n = at(v);
    for (const auto& c : n.child) {
      if (c && at(*c).parent != v) err << "asymmetric link " << v << "-" << *c << "; ";
    }
    if (!v.helper) {
      if (n.child_count() != 0) err << "real vertex " << v << " has children; ";
      return {v.id, v.id};
    }
    if (n.child_count() == 0) {
      err << "childless helper " << v << "; ";
      return {v.id, v.id};
    }
    if (!nodes_.count(Vertex::real(v.id))) err << "helper " << v << " host not a leaf; ";
    std::pair<NodeId, NodeId> mm{~NodeId{0}, 0};
    for (int s = 0; s < 2; ++s) {
      if (!n.child[s]) continue;
      auto [lo, hi] = rec(*n.child[s]);
      if (s == 0 && hi > v.id) err << "left subtree of " << v << " exceeds key; ";
      if (s == 1 && lo <= v.id) err << "right subtree of " << v << " below key; ";
      mm.first = std::min(mm.first, lo);
      mm.second = std::max(mm.second, hi);
    }
    if (!n.range.contains(mm.first) || !n.range.contains(mm.second)) {
      err << "range of " << v << " misses leaves; ";
    }
    return mm;
  };
  rec(*root_);
  if (seen != nodes_.size()) err << "unreachable vertices; ";
  auto leaves = leaves_in_order();
  if (!std::is_sorted(leaves.begin(), leaves.end())) err << "leaves out of order; ";
  return err.str();
}

RtBlueprint build_rt_blueprint(std::span<const ChildSlot> children) {
  if (children.empty()) throw Error(ErrorCode::kEmptyChildren, "no children");
  std::vector<ChildSlot> c(children.begin(), children.end());
  std::sort(c.begin(), c.end(),
            [](const ChildSlot& a, const ChildSlot& b) { return a.id < b.id; });
  const std::size_t x = c.size();
  RtBlueprint bp;

  auto leaf = [&](std::size_t i) {
    Vertex v = Vertex::real(c[i].id);
    bp.insert(v).port = c[i].port;
    return v;
  };
  auto helper = [&](std::size_t i, std::size_t first, std::size_t last) {
    Vertex v = Vertex::helper_of(c[i].id);
    RtNode& n = bp.insert(v);
    n.port = c[i].port;
    n.range = {c[first].d, c[last].id};
    return v;
  };
  auto link = [&](const Vertex& p, int side, const Vertex& ch) {
    bp.at(p).child[side] = ch;
    bp.at(ch).parent = p;
  };
  // Balanced leaf-oriented BST over c[first..last].
  std::function<Vertex(std::size_t, std::size_t)> bst = [&](std::size_t first,
                                                            std::size_t last) {
    if (first == last) return leaf(first);
    std::size_t k = last - first + 1;
    std::size_t split = first + (k + 1) / 2 - 1;
    Vertex h = helper(split, first, last);
    link(h, 0, bst(first, split));
    link(h, 1, bst(split + 1, last));
    return h;
  };

  Vertex root = helper(x - 1, 0, x - 1);
  bp.set_root(root);
  if (x == 1) {
    link(root, 0, leaf(0));
    return bp;
  }
  Vertex second = helper(x - 2, 0, x - 1);
  link(root, 0, second);
  link(second, 0, bst(0, x - 2));
  link(second, 1, leaf(x - 1));
  return bp;
}

}  // namespace cft
