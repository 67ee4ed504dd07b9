#include "cft/topology.hpp"

namespace cft {

std::size_t TVertex::child_count() const {
  std::size_t k = 0;
  for (const auto& c : child) k += c ? 1 : 0;
  return k;
}

std::set<NodeId> DeletionNotice::notified() const {
  std::set<NodeId> out;
  for (const auto& v : neighbours) out.insert(v.host());
  return out;
}

Topology::Topology(const LabelledTree& t0) : alive_(t0.n + 1, true), live_(t0.n) {
  alive_[0] = false;
  for (NodeId v = 1; v <= t0.n; ++v) {
    TVertex tv;
    if (t0.parent[v] != kNoNode) tv.parent = Vertex::real(t0.parent[v]);
    for (NodeId c : t0.children[v]) tv.child.push_back(Vertex::real(c));
    verts_[Vertex::real(v)] = tv;
  }
  if (t0.n > 0) root_ = Vertex::real(t0.root);
}

std::vector<NodeId> Topology::live_nodes() const {
  std::vector<NodeId> out;
  for (NodeId v = 1; v < alive_.size(); ++v) {
    if (alive_[v]) out.push_back(v);
  }
  return out;
}

const TVertex& Topology::at(const Vertex& v) const {
  auto it = verts_.find(v);
  if (it == verts_.end()) {
    throw Error(ErrorCode::kUnknownNode, "no vertex " + to_string(v));
  }
  return it->second;
}

TVertex& Topology::mut(const Vertex& v) { return const_cast<TVertex&>(at(v)); }

std::vector<Vertex> Topology::children(const Vertex& v) const {
  std::vector<Vertex> out;
  for (const auto& c : at(v).child) {
    if (c) out.push_back(*c);
  }
  return out;
}

PortNumber Topology::port_of(const Vertex& parent, const Vertex& child) const {
  const auto& ch = at(parent).child;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    if (ch[i] == child) return static_cast<PortNumber>(i + 1);
  }
  throw Error(ErrorCode::kInternal,
              to_string(child) + " not a child of " + to_string(parent));
}

Position Topology::position_of(const Vertex& v) const {
  const TVertex& tv = at(v);
  if (!tv.parent) return {};
  return {tv.parent, port_of(*tv.parent, v)};
}

OptVertex Topology::at_port(const Vertex& v, PortNumber port) const {
  const TVertex& tv = at(v);
  if (port == 0) return tv.parent;
  if (port > tv.child.size()) return std::nullopt;
  return tv.child[port - 1];
}

bool Topology::is_leaf(NodeId v) const {
  return at(Vertex::real(v)).child_count() == 0;
}

std::set<NodeId> Topology::neighbour_hosts(NodeId host) const {
  std::set<NodeId> out;
  for (bool helper : {false, true}) {
    Vertex v{host, helper};
    auto it = verts_.find(v);
    if (it == verts_.end()) continue;
    if (it->second.parent && it->second.parent->host() != host) {
      out.insert(it->second.parent->host());
    }
    for (const auto& c : it->second.child) {
      if (c && c->host() != host) out.insert(c->host());
    }
  }
  return out;
}

std::size_t Topology::degree(NodeId host) const {
  std::size_t k = 0;
  for (bool helper : {false, true}) {
    Vertex v{host, helper};
    auto it = verts_.find(v);
    if (it == verts_.end()) continue;
    if (it->second.parent && it->second.parent->host() != host) ++k;
    for (const auto& c : it->second.child) {
      if (c && c->host() != host) ++k;
    }
  }
  return k;
}

void Topology::apply_edge(const Vertex& a, PortNumber port_a, const Vertex& b,
                          PortNumber port_b) {
  if (!alive(a.host()) || !alive(b.host()) || !contains(a) || !contains(b)) {
    throw Error(ErrorCode::kDeadEndpoint, to_string(a) + "-" + to_string(b));
  }
  if (port_b != kParentPort || port_a == kParentPort) {
    throw Error(ErrorCode::kPreconditionViolated,
                "child side must use port 0, parent side a child port");
  }
  TVertex& ta = mut(a);
  if (a.helper && port_a > 2) {
    throw Error(ErrorCode::kPreconditionViolated, "helper port out of range");
  }
  if (ta.child.size() < port_a) ta.child.resize(port_a);
  auto live = [&](const OptVertex& o) { return o && contains(*o); };
  const OptVertex& occ = ta.child[port_a - 1];
  if (live(occ) && occ != b) {
    throw Error(ErrorCode::kPortInUse,
                to_string(a) + " port " + std::to_string(port_a));
  }
  TVertex& tb = mut(b);
  if (live(tb.parent) && tb.parent != a) {
    throw Error(ErrorCode::kPortInUse, to_string(b) + " port 0");
  }
  ta.child[port_a - 1] = b;
  tb.parent = a;
}

void Topology::detach(const Vertex& v) {
  TVertex& tv = mut(v);
  if (tv.parent && contains(*tv.parent)) {
    for (auto& c : mut(*tv.parent).child) {
      if (c == v) c.reset();
    }
  }
  if (!tv.parent && root_ == v) root_.reset();
  tv.parent.reset();
}

DeletionNotice Topology::delete_node(NodeId x) {
  if (x == kNoNode || x >= alive_.size()) {
    throw Error(ErrorCode::kUnknownNode, std::to_string(x));
  }
  if (!alive_[x]) throw Error(ErrorCode::kAlreadyDeleted, std::to_string(x));
  if (live_ == 1) throw Error(ErrorCode::kLastNode, std::to_string(x));

  DeletionNotice notice;
  notice.x = x;
  notice.was_leaf = is_leaf(x);
  for (bool helper : {false, true}) {
    Vertex v{x, helper};
    if (!contains(v)) continue;
    notice.ghosts.push_back({v, at(v), position_of(v)});
  }
  for (const auto& g : notice.ghosts) {
    if (g.links.parent && g.links.parent->host() != x) {
      notice.neighbours.insert(*g.links.parent);
    }
    for (const auto& c : g.links.child) {
      if (c && c->host() != x) notice.neighbours.insert(*c);
    }
  }
  for (const auto& g : notice.ghosts) remove_vertex(g.v);
  alive_[x] = false;
  --live_;
  return notice;
}

void Topology::add_helper(NodeId key, IdRange range) {
  Vertex h = Vertex::helper_of(key);
  if (!alive(key)) throw Error(ErrorCode::kDeadEndpoint, to_string(h));
  if (contains(h)) {
    throw Error(ErrorCode::kPreconditionViolated, "host already simulates " + to_string(h));
  }
  TVertex tv;
  tv.child.resize(2);
  tv.range = range;
  verts_[h] = tv;
}

void Topology::remove_vertex(const Vertex& v) {
  detach(v);
  for (const auto& c : at(v).child) {
    if (c && contains(*c)) mut(*c).parent.reset();
  }
  verts_.erase(v);
}

void Topology::unlink(const Vertex& parent, PortNumber port) {
  OptVertex c = at_port(parent, port);
  if (port == 0 || !c) return;
  detach(*c);
}

void Topology::bypass(const Vertex& h) {
  if (!h.helper || at(h).child_count() != 1) {
    throw Error(ErrorCode::kPreconditionViolated,
                "bypass of " + to_string(h) + " needs exactly one child");
  }
  Vertex c = children(h).front();
  Position pos = position_of(h);
  bool was_root = root_ == h;
  detach(c);
  remove_vertex(h);
  if (pos.parent || was_root) place(c, pos);
}

void Topology::place(const Vertex& v, const Position& pos) {
  detach(v);
  if (!pos.parent) {
    root_ = v;
    return;
  }
  apply_edge(*pos.parent, pos.port, v, kParentPort);
}

void Topology::set_range(const Vertex& h, IdRange r) { mut(h).range = r; }

Topology Topology::snapshot() const {
  if (healing_) throw Error(ErrorCode::kHealingInProgress, "snapshot mid-phase");
  Topology copy = *this;
  return copy;
}

}  // namespace cft
