#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cft/types.hpp"

namespace cft {

/// A child slot handed to the blueprint builder.
struct ChildSlot {
  NodeId id = kNoNode;
  NodeId d = kNoNode;  // smallest descendant of the child
  PortNumber port = 0;  // port of the child at the will owner
};

struct RtNode {
  OptVertex parent;
  std::array<OptVertex, 2> child;  // [0] left, [1] right
  IdRange range;                   // meaningful for helpers only
  PortNumber port = 0;  // port <r> of the representative at the will owner

  std::size_t child_count() const {
    return (child[0] ? 1 : 0) + (child[1] ? 1 : 0);
  }
  friend bool operator==(const RtNode&, const RtNode&) = default;
};

/// Outcome of removing one leaf from a tree of helpers.
struct LeafRemoval {
  Vertex leaf;
  Vertex bypassed;           // the helper that lost its child
  OptVertex upper;           // parent of the bypassed helper
  OptVertex lower;           // the remaining child that moved up
  OptVertex taken_over;      // helper(x) whose position was inherited
  OptVertex successor;       // helper that now occupies that position
};

/// Reconstruction tree: real children as leaves, helpers keyed by their
/// hosts as internal vertices. Also used for evolving wills.
class RtBlueprint {
 public:
  RtBlueprint() = default;

  bool empty() const { return !root_; }
  OptVertex root() const { return root_; }
  /// The heir: host of the root.
  NodeId heir() const { return root_ ? root_->host() : kNoNode; }

  bool contains(const Vertex& v) const { return nodes_.count(v) > 0; }
  const RtNode& at(const Vertex& v) const;
  RtNode& at(const Vertex& v);
  const std::map<Vertex, RtNode>& nodes() const { return nodes_; }

  std::vector<NodeId> leaves_in_order() const;
  std::size_t leaf_count() const;
  std::size_t helper_count() const;
  /// Edge count on the longest root-to-leaf path.
  std::size_t depth() const;
  /// Which side of its parent v hangs on; nullopt for the root.
  std::optional<int> side_of(const Vertex& v) const;

  /// Host of the slot representative replaced: Real(from)/helper(from) are
  /// renamed to Real(to)/helper(to), links and ranges kept.
  void rename(NodeId from, NodeId to);
  /// Removes leaf Real(x): bypass of its parent, plus takeover of helper(x)
  /// by the bypassed helper's host when the parent is not helper(x).
  LeafRemoval remove_leaf(NodeId x);

  /// Checks ordering and key invariants; returns a description or "".
  std::string validate() const;

  // Low-level mutation for reconstruction from fragments.
  RtNode& insert(const Vertex& v) { return nodes_[v]; }
  void erase(const Vertex& v) { nodes_.erase(v); }
  void set_root(OptVertex v) { root_ = v; }
  /// Replaces the link parent->old with parent->repl (or the root).
  void replace_child(OptVertex parent, const Vertex& old, OptVertex repl);

  friend bool operator==(const RtBlueprint&, const RtBlueprint&) = default;

 private:
  std::map<Vertex, RtNode> nodes_;
  OptVertex root_;
};

/// Builds RT over children given in any order (sorted internally).
RtBlueprint build_rt_blueprint(std::span<const ChildSlot> children);

/// ceil(log2 x) for x >= 1.
std::size_t ceil_log2(std::size_t x);

}  // namespace cft
