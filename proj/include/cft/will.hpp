#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "cft/blueprint.hpp"
#include "cft/preprocess.hpp"
#include "cft/topology.hpp"

namespace cft {

/// A vertex tagged with the port it hangs from at its parent.
struct WillRef {
  Vertex v;
  PortNumber port = 0;

  friend bool operator==(const WillRef&, const WillRef&) = default;
};
using OptRef = std::optional<WillRef>;

/// Links of Will(owner) incident to Slot(rep) or helper(rep).
struct Willportion {
  NodeId owner = kNoNode;
  NodeId rep = kNoNode;
  PortNumber port = 0;  // <rep> at owner
  OptRef leaf_parent;
  bool has_helper = false;
  OptRef h_parent;
  std::array<OptRef, 2> h_child;
  IdRange h_range;

  std::size_t refs() const;
  friend bool operator==(const Willportion&, const Willportion&) = default;
};

enum class WillLevel : std::uint8_t { kTree, kWill };

/// Bypass plus optional takeover prepared for a leaf's death.
struct LeafWill {
  WillLevel level = WillLevel::kTree;
  NodeId owner = kNoNode;
  NodeId will_owner = kNoNode;  // real parent p for kWill
  Vertex bypassed;
  OptRef upper;  // where the bypassed helper hangs
  OptRef lower;  // its surviving child
  bool takeover = false;
  OptRef t_parent;
  std::array<OptRef, 2> t_child;
  IdRange t_range;

  std::size_t refs() const;
  friend bool operator==(const LeafWill&, const LeafWill&) = default;
};

struct HeldLeafWill {
  NodeId heir = kNoNode;
  LeafWill will;
};

/// What the heir of Will(of) keeps so that of's duties survive its death.
struct HeirBackup {
  NodeId of = kNoNode;
  OptRef parent;
  std::optional<Willportion> portion;
  bool has_helper = false;
  OptRef h_parent;
  std::array<OptRef, 2> h_child;
  IdRange h_range;

  std::size_t refs() const;
  friend bool operator==(const HeirBackup&, const HeirBackup&) = default;
};

/// Everything a real node stores.
struct NodeState {
  OptRef parent;
  std::size_t numchildren = 0;
  PortNumber maxportnumber = 0;
  OptRef heir;
  bool has_helper = false;
  OptRef h_parent;
  std::array<OptRef, 2> h_child;
  IdRange h_range;
  std::optional<Willportion> portion;
  std::optional<HeirBackup> backup;
  std::vector<LeafWill> held;  // sorted by (level, owner)
  TzFields tz;
  RoutingLabel label;

  /// Stored (id, port) pairs; the routing label is packet state, not counted.
  std::size_t refs() const;
  friend bool operator==(const NodeState&, const NodeState&) = default;
};

/// Ground truth wills of all live non-leaf owners, keyed by owner.
using WillMap = std::map<NodeId, RtBlueprint>;

WillMap initial_wills(const LabelledTree& t0);

/// Link from v to its parent in the blueprint, with the port it hangs at.
OptRef will_parent_ref(const RtBlueprint& bp, const Vertex& v);
Willportion project_portion(const RtBlueprint& bp, NodeId owner, NodeId rep);
/// Rebuilds a will from the portions of its representatives.
RtBlueprint reconstruct_will(const std::vector<Willportion>& portions);

/// LeafWill of leaf x under a helper in T_t, with its LeafHeir.
std::optional<HeldLeafWill> tree_leaf_will(const Topology& t, NodeId x);
/// LeafWill of representative x inside Will(owner), with its LeafHeir.
std::optional<HeldLeafWill> will_leaf_will(const RtBlueprint& bp, NodeId owner,
                                           NodeId x);
/// Whether representative x of Will(owner) needs a will-level LeafWill.
bool needs_will_leaf_will(const Topology& t, const RtBlueprint& bp, NodeId owner,
                          NodeId x);

/// Computes every node's state from T_t and the wills.
std::vector<NodeState> derive_states(const LabelledTree& t0, const Topology& t,
                                     const WillMap& wills);

}  // namespace cft
