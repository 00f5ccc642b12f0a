#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clansim {

enum class ErrorCode {
  kInvalidArgument,
  kInsufficientSupport,
  kNoClosedForm,
  kTruncationInconclusive,
  kUnboundedDensity,
  kQueryOrderViolation,
  kBirthTimeCollision,
  kClanCapExceeded,
  kEnvelopeViolation,
  kStateSpaceTooLarge,
  kMultiplicityUnbounded,
  kNotRealizable,
  kCatalogTooLarge,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; code() identifies the
// condition so that drivers can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace clansim
