#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cft {

/// Post-order DFS number assigned by preprocessing (1..n).
using NodeId = std::uint32_t;
using PortNumber = std::uint16_t;

inline constexpr NodeId kNoNode = 0;
/// Port 0 of every real node is reserved for its tree parent.
inline constexpr PortNumber kParentPort = 0;

/// "node attached at port <port> of some context node".
struct PortRef {
  NodeId node = kNoNode;
  PortNumber port = 0;

  friend auto operator<=>(const PortRef&, const PortRef&) = default;
};

/// A vertex of the live tree: either a real node or the helper it simulates.
/// Helpers are keyed by their host, so Helper(k) is always hosted by real k.
struct Vertex {
  NodeId id = kNoNode;
  bool helper = false;

  static constexpr Vertex real(NodeId v) { return {v, false}; }
  static constexpr Vertex helper_of(NodeId v) { return {v, true}; }

  constexpr NodeId host() const { return id; }
  constexpr bool valid() const { return id != kNoNode; }

  friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

using OptVertex = std::optional<Vertex>;

inline std::string to_string(const Vertex& v) {
  return (v.helper ? "h" : "") + std::to_string(v.id);
}

inline std::ostream& operator<<(std::ostream& os, const Vertex& v) {
  return os << to_string(v);
}

/// Closed interval of node IDs.
struct IdRange {
  NodeId lo = 1;
  NodeId hi = 0;

  constexpr bool contains(NodeId w) const { return lo <= w && w <= hi; }
  constexpr bool empty() const { return hi < lo; }

  friend bool operator==(const IdRange&, const IdRange&) = default;
};

enum class ErrorCode {
  kPortInUse,
  kDeadEndpoint,
  kAlreadyDeleted,
  kLastNode,
  kUnknownNode,
  kHealingInProgress,
  kDisconnectedGraph,
  kEmptyChildren,
  kPreconditionViolated,
  kMalformedLabel,
  kTruncatedHeader,
  kPairCountOutOfRange,
  kSenderDead,
  kExhausted,
  kConfigInvalid,
  kOracleViolation,
  kInternal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cft
