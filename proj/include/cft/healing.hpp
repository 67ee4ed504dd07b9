#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cft/preprocess.hpp"
#include "cft/topology.hpp"
#include "cft/will.hpp"

namespace cft {

enum class MsgKind : std::uint8_t {
  kConnect,
  kAck,
  kBrLeafLost,
  kBrNodeReplace,
  kPtWillConnection,
  kPtNewLeafWill,
  kPtBackup,
};

const char* to_string(MsgKind kind);

struct HealMessage {
  std::size_t round = 0;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  MsgKind kind = MsgKind::kAck;
  std::size_t refs = 0;

  friend auto operator<=>(const HealMessage&, const HealMessage&) = default;
};

/// A change to one will during a phase.
struct WillEvent {
  NodeId owner = kNoNode;
  bool removal = false;
  NodeId old_rep = kNoNode;
  NodeId new_rep = kNoNode;  // rename only
  LeafRemoval removed;       // removal only
};

struct MessageBoundViolation {
  NodeId node = kNoNode;
  std::size_t sent = 0;
  std::size_t degree = 0;
};

struct HealingPhase {
  NodeId trigger = kNoNode;
  bool was_leaf = false;
  std::set<NodeId> notified;
  std::size_t rounds = 0;
  std::vector<HealMessage> messages;  // sorted
  std::vector<WillEvent> will_events;
  std::size_t max_sent = 0;
  std::size_t max_msg_refs = 0;
  std::size_t max_stored_refs = 0;
  std::vector<MessageBoundViolation> over_budget;
};

/// Owns T_t, the ground-truth wills and every node's stored state.
class HealingEngine {
 public:
  HealingEngine(const LabelledTree& t0, std::uint64_t seed);

  const LabelledTree& t0() const { return *t0_; }
  const Topology& topology() const { return topo_; }
  const std::vector<NodeState>& states() const { return states_; }
  const WillMap& wills() const { return wills_; }
  std::size_t nonleaf_deletions() const { return nonleaf_deletions_; }

  /// Deletes x and runs one healing phase.
  HealingPhase delete_and_heal(NodeId x);

 private:
  void fix_nonleaf(const DeletionNotice& notice);
  void fix_leaf(const DeletionNotice& notice);
  std::vector<WillEvent> sync_wills();
  void plan_messages(HealingPhase& phase, const DeletionNotice& notice,
                     const std::vector<NodeState>& desired,
                     const std::set<std::pair<Vertex, Vertex>>& edges_before);

  const LabelledTree* t0_;
  Topology topo_;
  WillMap wills_;
  std::vector<NodeState> states_;
  std::uint64_t seed_;
  std::uint64_t phase_counter_ = 0;
  std::size_t nonleaf_deletions_ = 0;
};

/// Physical tree edges as (parent vertex, child vertex) between distinct hosts.
std::set<std::pair<Vertex, Vertex>> physical_edges(const Topology& t);

}  // namespace cft
