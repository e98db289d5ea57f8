#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace soar {

enum class ErrorCode {
  kCycleDetected,
  kDisconnectedNode,
  kDuplicateParent,
  kNonPositiveRate,
  kUnknownRoot,
  kOutOfRangeDistance,
  kBlueNotAvailable,
  kPayloadCountMismatch,
  kBudgetNegative,
  kTableMismatch,
  kNotCompleteBinary,
  kInstanceTooLarge,
  kBadSize,
  kBadParams,
  kParseError,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace soar
