#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltv {

enum class ErrorCode {
  kInvalidModel,
  kCycleDetected,
  kInvalidConfig,
  kUnknownFamily,
  kInvalidParameters,
  kInvalidPolicy,
  kInvalidStats,
  kUnboundedModel,
  kUnboundedLtv,
  kBracketOverflow,
  kTooManyPolicies,
  kModeMismatch,
  kParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable error code. Every failure raised by
/// the library is an ltv::Error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ltv
