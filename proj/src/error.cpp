#include "soar/error.hpp"

namespace soar {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kDisconnectedNode: return "DisconnectedNode";
    case ErrorCode::kDuplicateParent: return "DuplicateParent";
    case ErrorCode::kNonPositiveRate: return "NonPositiveRate";
    case ErrorCode::kUnknownRoot: return "UnknownRoot";
    case ErrorCode::kOutOfRangeDistance: return "OutOfRangeDistance";
    case ErrorCode::kBlueNotAvailable: return "BlueNotAvailable";
    case ErrorCode::kPayloadCountMismatch: return "PayloadCountMismatch";
    case ErrorCode::kBudgetNegative: return "BudgetNegative";
    case ErrorCode::kTableMismatch: return "TableMismatch";
    case ErrorCode::kNotCompleteBinary: return "NotCompleteBinary";
    case ErrorCode::kInstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::kBadSize: return "BadSize";
    case ErrorCode::kBadParams: return "BadParams";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace soar
