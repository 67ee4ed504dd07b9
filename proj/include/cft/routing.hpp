#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cft/preprocess.hpp"
#include "cft/topology.hpp"

namespace cft {

struct HeaderPair {
  NodeId target = kNoNode;
  RoutingLabel label;

  friend bool operator==(const HeaderPair&, const HeaderPair&) = default;
};

/// Fresh packets carry (t, L(t)) then (s, L(s)); returning packets one pair.
struct PacketHeader {
  std::vector<HeaderPair> pairs;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const PacketHeader&, const PacketHeader&) = default;
};

/// u8 pairCount; per pair u32 target, u16 labelLen, labelLen x u16 ports;
/// then payload. Integers are little-endian.
std::vector<std::uint8_t> encode_header(const PacketHeader& header);
PacketHeader decode_header(std::span<const std::uint8_t> bytes);

enum class ActionKind : std::uint8_t {
  kDeliver,
  kForwardPort,
  kForwardParentOfHelper,
  kForwardLeftChild,
  kForwardRightChild,
  kNonDeliverableBounce,
};

const char* to_string(ActionKind kind);

struct RouteAction {
  ActionKind kind = ActionKind::kDeliver;
  PortNumber port = 0;  // kForwardPort only

  friend bool operator==(const RouteAction&, const RouteAction&) = default;
};

/// One step of the interval scheme at a real node.
RouteAction tz_step(const TzFields& fields, NodeId w, const RoutingLabel& label);

/// One step at any live vertex of T_t. A forward into an empty slot becomes
/// kNonDeliverableBounce.
RouteAction ftz_step(const Topology& t, const LabelledTree& t0, const Vertex& at,
                     NodeId w, const RoutingLabel& label);

/// Vertex reached by a forwarding action, if the slot is occupied.
OptVertex next_vertex(const Topology& t, const Vertex& at, const RouteAction& action);

/// Rule 1: a real leaf that is not the target. Rule 2: nowhere to forward.
/// Rule 3: the packet would go back where it came from.
bool detect_nondelivery(const Topology& t, const Vertex& at, NodeId target,
                        const RouteAction& action, const OptVertex& arrived_from);

enum class RouteStatus : std::uint8_t { kDelivered, kReturnedToSender, kDiscarded };

const char* to_string(RouteStatus status);

struct RouteOutcome {
  RouteStatus status = RouteStatus::kDelivered;
  std::vector<Vertex> forward;  // injection vertex to delivery or bounce point
  std::vector<Vertex> back;     // bounce point onward, empty if none
  std::size_t logical_hops = 0;
  std::size_t physical_hops = 0;

  std::size_t forward_hops() const { return forward.empty() ? 0 : forward.size() - 1; }
  std::size_t back_hops() const { return back.empty() ? 0 : back.size() - 1; }
};

/// A packet in flight, advanced one forwarding decision at a time.
class PacketWalk {
 public:
  PacketWalk(const Vertex& start, PacketHeader header);

  bool done() const { return done_; }
  NodeId host() const { return at_.host(); }
  const PacketHeader& header() const { return header_; }
  /// Makes one forwarding decision; returns done().
  bool step(const Topology& t, const LabelledTree& t0);
  /// After a healing phase the buffering vertex may be gone; the packet
  /// stays with its host.
  void reanchor(const Topology& t);
  RouteOutcome outcome() const;

 private:
  PacketHeader header_;
  Vertex at_;
  OptVertex from_;
  RouteOutcome out_;
  bool returning_ = false;
  bool done_ = false;
};

/// Routes a packet with an arbitrary header from a live vertex.
RouteOutcome route_header(const Topology& t, const LabelledTree& t0, const Vertex& start,
                          PacketHeader header);

/// Routes s -> t with a fresh two-pair header; throws kSenderDead.
RouteOutcome route_packet(const Topology& t, const LabelledTree& t0, NodeId s, NodeId dst);

}  // namespace cft
