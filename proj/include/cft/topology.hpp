#pragma once

#include <map>
#include <set>
#include <vector>

#include "cft/preprocess.hpp"
#include "cft/types.hpp"

namespace cft {

/// Links of one vertex. Port 0 is the parent; port p >= 1 is child[p-1].
/// Real vertices keep their T0 child ports; helpers have ports 1 (left) and
/// 2 (right).
struct TVertex {
  OptVertex parent;
  std::vector<OptVertex> child;
  IdRange range;  // helpers only

  std::size_t child_count() const;
  friend bool operator==(const TVertex&, const TVertex&) = default;
};

/// Where a vertex hangs: under `parent` at `port`, or the root if no parent.
struct Position {
  OptVertex parent;
  PortNumber port = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

/// State of a deleted vertex just before deletion.
struct Ghost {
  Vertex v;
  TVertex links;
  Position position;
};

struct DeletionNotice {
  NodeId x = kNoNode;
  bool was_leaf = false;
  std::vector<Ghost> ghosts;      // Real(x), then helper(x) if any
  std::set<Vertex> neighbours;    // live vertices adjacent to x's vertices

  std::set<NodeId> notified() const;
};

/// The live tree T_t over real and helper vertices.
class Topology {
 public:
  Topology() = default;
  explicit Topology(const LabelledTree& t0);

  std::size_t n() const { return alive_.size() - 1; }
  bool alive(NodeId v) const { return v < alive_.size() && alive_[v]; }
  std::size_t live_count() const { return live_; }
  std::vector<NodeId> live_nodes() const;
  OptVertex root() const { return root_; }
  bool contains(const Vertex& v) const { return verts_.count(v) > 0; }
  bool has_helper(NodeId v) const { return contains(Vertex::helper_of(v)); }
  const TVertex& at(const Vertex& v) const;
  const std::map<Vertex, TVertex>& vertices() const { return verts_; }

  std::vector<Vertex> children(const Vertex& v) const;
  /// Port of `child` at `parent`; throws if not linked.
  PortNumber port_of(const Vertex& parent, const Vertex& child) const;
  Position position_of(const Vertex& v) const;
  /// Vertex bound at a port (0 = parent).
  OptVertex at_port(const Vertex& v, PortNumber port) const;
  bool is_leaf(NodeId v) const;
  /// Physical degree: links to vertices of other hosts.
  std::size_t degree(NodeId host) const;
  /// Physical neighbour hosts.
  std::set<NodeId> neighbour_hosts(NodeId host) const;

  /// Links child b (at its port 0) under a at port_a. A port whose previous
  /// occupant is dead counts as free.
  void apply_edge(const Vertex& a, PortNumber port_a, const Vertex& b,
                  PortNumber port_b);
  DeletionNotice delete_node(NodeId x);

  void add_helper(NodeId key, IdRange range);
  void remove_vertex(const Vertex& v);
  void unlink(const Vertex& parent, PortNumber port);
  /// Removes a one-child helper joining its parent and child directly.
  void bypass(const Vertex& h);
  void place(const Vertex& v, const Position& pos);
  /// Cuts v from its parent (or from the root slot).
  void detach(const Vertex& v);
  void set_range(const Vertex& h, IdRange r);

  void begin_healing() { healing_ = true; }
  void end_healing() { healing_ = false; }
  bool healing() const { return healing_; }
  /// Immutable copy; throws HealingInProgress mid-phase.
  Topology snapshot() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.verts_ == b.verts_ && a.alive_ == b.alive_ && a.root_ == b.root_;
  }

 private:
  TVertex& mut(const Vertex& v);

  std::map<Vertex, TVertex> verts_;
  std::vector<bool> alive_;
  std::size_t live_ = 0;
  OptVertex root_;
  bool healing_ = false;
};

}  // namespace cft
