#include "cft/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace cft {

namespace {

constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> bfs(const std::vector<std::vector<NodeId>>& adj, NodeId src) {
  std::vector<std::size_t> d(adj.size(), kInf);
  std::queue<NodeId> q;
  d[src] = 0;
  q.push(src);
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (NodeId u : adj[v]) {
      if (d[u] == kInf) {
        d[u] = d[v] + 1;
        q.push(u);
      }
    }
  }
  return d;
}

CheckResult fail(CheckResult r, const std::string& why) {
  r.passed = false;
  if (r.counterexample.empty()) r.counterexample = why;
  return r;
}

}  // namespace

const char* to_string(CheckId id) {
  switch (id) {
    case CheckId::kTreeShape: return "tree";
    case CheckId::kBst: return "bst";
    case CheckId::kDegree: return "degree";
    case CheckId::kDiameter: return "diameter";
    case CheckId::kMemory: return "memory";
    case CheckId::kHelpers: return "helpers";
    case CheckId::kRouting: return "routing";
  }
  return "?";
}

Oracle::Oracle(const LabelledTree& t0) : t0_(&t0) {
  const std::size_t n = t0.n;
  std::vector<std::vector<NodeId>> adj(n + 1);
  for (NodeId v = 1; v <= n; ++v) {
    adj[v] = t0.children[v];
    if (t0.parent[v] != kNoNode) adj[v].push_back(t0.parent[v]);
    max_degree_ = std::max(max_degree_, adj[v].size());
  }
  dist_.resize(n + 1);
  gdist_.resize(n + 1);
  for (NodeId v = 1; v <= n; ++v) {
    dist_[v] = bfs(adj, v);
    gdist_[v] = bfs(t0.graph_adj, v);
    for (NodeId u = 1; u <= n; ++u) diameter_ = std::max(diameter_, dist_[v][u]);
  }
}

std::size_t Oracle::log_delta() const { return ceil_log2(std::max<std::size_t>(max_degree_, 1)); }

std::size_t Oracle::path_bound(NodeId u, NodeId w, std::size_t y) const {
  return dist_t0(u, w) + y * log_delta();
}

std::size_t Oracle::diameter_bound() const { return diameter_ * (log_delta() + 1); }

CheckResult Oracle::tree_shape(const Topology& t) const {
  CheckResult r{CheckId::kTreeShape, true, 0, {}};
  if (!t.root()) return fail(r, "no root");
  std::size_t seen = 0;
  std::vector<Vertex> stack{*t.root()};
  std::set<Vertex> visited;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (!visited.insert(v).second) return fail(r, "cycle through " + to_string(v));
    ++seen;
    if (!t.alive(v.host())) return fail(r, "vertex " + to_string(v) + " on dead host");
    for (const Vertex& c : t.children(v)) {
      if (!t.contains(c)) return fail(r, "dangling child " + to_string(c));
      if (t.at(c).parent != v) return fail(r, "asymmetric link " + to_string(v) + "-" + to_string(c));
      stack.push_back(c);
    }
  }
  r.checked = seen;
  if (seen != t.vertices().size()) return fail(r, "unreachable vertices");
  for (NodeId v : t.live_nodes()) {
    if (!t.contains(Vertex::real(v))) return fail(r, "live node " + std::to_string(v) + " missing");
  }
  return r;
}

CheckResult Oracle::bst(const Topology& t) const {
  CheckResult r{CheckId::kBst, true, 0, {}};
  if (!t.root()) return r;
  // Returns [min, max] of vertex ids in the subtree of v.
  std::function<std::pair<NodeId, NodeId>(const Vertex&)> rec =
      [&](const Vertex& v) -> std::pair<NodeId, NodeId> {
    ++r.checked;
    std::pair<NodeId, NodeId> mm{v.id, v.id};
    std::vector<std::pair<NodeId, NodeId>> kids;
    const TVertex& tv = t.at(v);
    for (std::size_t i = 0; i < tv.child.size(); ++i) {
      if (!tv.child[i]) continue;
      auto sub = rec(*tv.child[i]);
      kids.push_back(sub);
      mm.first = std::min(mm.first, sub.first);
      mm.second = std::max(mm.second, sub.second);
      if (!r.passed) continue;
      std::ostringstream os;
      if (!v.helper && sub.second >= v.id) {
        os << "subtree at port " << i + 1 << " of " << v << " reaches " << sub.second;
      } else if (v.helper && i == 0 && sub.second > v.id) {
        os << "left subtree of " << v << " reaches " << sub.second;
      } else if (v.helper && i == 1 && sub.first <= v.id) {
        os << "right subtree of " << v << " reaches " << sub.first;
      }
      if (!os.str().empty()) r = fail(r, os.str());
    }
    std::sort(kids.begin(), kids.end());
    for (std::size_t i = 1; i < kids.size() && r.passed; ++i) {
      if (kids[i].first <= kids[i - 1].second) {
        r = fail(r, "sibling intervals overlap under " + to_string(v));
      }
    }
    return mm;
  };
  rec(*t.root());
  return r;
}

CheckResult Oracle::degree(const Topology& t, std::size_t* max_increase,
                           NodeId* witness) const {
  CheckResult r{CheckId::kDegree, true, 0, {}};
  std::size_t best = 0;
  NodeId who = kNoNode;
  for (NodeId v : t.live_nodes()) {
    ++r.checked;
    const std::size_t now = t.degree(v);
    const std::size_t before = t0_->degree(v);
    const std::size_t inc = now > before ? now - before : 0;
    if (inc > best || who == kNoNode) {
      best = inc;
      who = v;
    }
    if (inc > 3 && r.passed) {
      r = fail(r, "node " + std::to_string(v) + " degree " + std::to_string(before) +
                      " -> " + std::to_string(now));
    }
  }
  if (max_increase) *max_increase = best;
  if (witness) *witness = who;
  return r;
}

std::size_t physical_diameter(const Topology& t) {
  std::vector<std::vector<NodeId>> adj(t.n() + 1);
  const auto live = t.live_nodes();
  for (NodeId v : live) {
    const auto nb = t.neighbour_hosts(v);
    adj[v].assign(nb.begin(), nb.end());
  }
  std::size_t best = 0;
  for (NodeId v : live) {
    auto d = bfs(adj, v);
    for (NodeId u : live) {
      if (d[u] != kInf) best = std::max(best, d[u]);
    }
  }
  return best;
}

CheckResult Oracle::diameter(const Topology& t, std::size_t* diameter) const {
  CheckResult r{CheckId::kDiameter, true, 0, {}};
  const std::size_t d = physical_diameter(t);
  r.checked = 1;
  if (diameter) *diameter = d;
  if (d > diameter_bound()) {
    return fail(r, "diameter " + std::to_string(d) + " > " + std::to_string(diameter_bound()));
  }
  return r;
}

CheckResult Oracle::memory(const Topology& t, const std::vector<NodeState>& states,
                           std::size_t* max_refs) const {
  CheckResult r{CheckId::kMemory, true, 0, {}};
  const std::size_t budget = 2 * std::size_t{t0_->b} + 40;
  std::size_t best = 0;
  for (NodeId v : t.live_nodes()) {
    ++r.checked;
    const std::size_t k = states[v].refs();
    best = std::max(best, k);
    if (k > budget && r.passed) {
      r = fail(r, "node " + std::to_string(v) + " stores " + std::to_string(k) + " refs");
    }
    const NodeState& s = states[v];
    if ((s.h_child[0] || s.h_child[1]) && !s.has_helper && r.passed) {
      r = fail(r, "node " + std::to_string(v) + " has helper children without a helper");
    }
  }
  if (max_refs) *max_refs = best;
  return r;
}

CheckResult Oracle::helpers(const Topology& t, const std::vector<NodeState>& states) const {
  CheckResult r{CheckId::kHelpers, true, 0, {}};
  std::map<NodeId, std::size_t> hosted;
  for (const auto& [v, tv] : t.vertices()) {
    if (!v.helper) continue;
    ++r.checked;
    if (++hosted[v.host()] > 1) r = fail(r, "host " + std::to_string(v.host()) + " has two helpers");
    if (!t.contains(Vertex::real(v.host()))) r = fail(r, "helper " + to_string(v) + " without host");
    if (t.has_helper(v.host()) != states[v.host()].has_helper) {
      r = fail(r, "helper flag of " + std::to_string(v.host()) + " disagrees with T_t");
    }
  }
  // LeafHeir duty sits with a vertex: the bypassed helper, or the other child
  // when the leaf hangs under its own helper.
  std::map<std::pair<WillLevel, Vertex>, std::size_t> duty;
  for (NodeId v : t.live_nodes()) {
    for (const auto& w : states[v].held) {
      const Vertex at = w.lower ? w.lower->v : w.bypassed;
      if (at.host() != v) {
        r = fail(r, "node " + std::to_string(v) + " holds LeafWill(" + std::to_string(w.owner) +
                        ") on behalf of " + to_string(at));
      }
      if (++duty[{w.level, at}] > 2) {
        r = fail(r, to_string(at) + " is LeafHeir of three " +
                        (w.level == WillLevel::kTree ? "tree-level" : "will-level") + " leaves");
      }
    }
  }
  return r;
}

std::vector<Vertex> tree_path(const Topology& t, const Vertex& a, const Vertex& b) {
  auto up = [&](Vertex v) {
    std::vector<Vertex> chain{v};
    while (t.at(chain.back()).parent) chain.push_back(*t.at(chain.back()).parent);
    return chain;
  };
  auto ua = up(a);
  auto ub = up(b);
  while (ua.size() > 1 && ub.size() > 1 && ua[ua.size() - 2] == ub[ub.size() - 2]) {
    ua.pop_back();
    ub.pop_back();
  }
  // ua.back() == ub.back() is the lowest common ancestor.
  std::vector<Vertex> path(ua.begin(), ua.end());
  for (auto it = ub.rbegin() + 1; it != ub.rend(); ++it) path.push_back(*it);
  return path;
}

}  // namespace cft
