#include "cft/types.hpp"

namespace cft {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPortInUse: return "PortInUse";
    case ErrorCode::kDeadEndpoint: return "DeadEndpoint";
    case ErrorCode::kAlreadyDeleted: return "AlreadyDeleted";
    case ErrorCode::kLastNode: return "LastNode";
    case ErrorCode::kUnknownNode: return "UnknownNode";
    case ErrorCode::kHealingInProgress: return "HealingInProgress";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kEmptyChildren: return "EmptyChildren";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kMalformedLabel: return "MalformedLabel";
    case ErrorCode::kTruncatedHeader: return "TruncatedHeader";
    case ErrorCode::kPairCountOutOfRange: return "PairCountOutOfRange";
    case ErrorCode::kSenderDead: return "SenderDead";
    case ErrorCode::kExhausted: return "Exhausted";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kOracleViolation: return "OracleViolation";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

}  // namespace cft
