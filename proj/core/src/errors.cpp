#include "clansim/errors.hpp"

namespace clansim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInsufficientSupport: return "insufficient-support";
    case ErrorCode::kNoClosedForm: return "no-closed-form";
    case ErrorCode::kTruncationInconclusive: return "truncation-inconclusive";
    case ErrorCode::kUnboundedDensity: return "unbounded-density";
    case ErrorCode::kQueryOrderViolation: return "query-order-violation";
    case ErrorCode::kBirthTimeCollision: return "birth-time-collision";
    case ErrorCode::kClanCapExceeded: return "clan-cap-exceeded";
    case ErrorCode::kEnvelopeViolation: return "envelope-violation";
    case ErrorCode::kStateSpaceTooLarge: return "state-space-too-large";
    case ErrorCode::kMultiplicityUnbounded: return "multiplicity-unbounded";
    case ErrorCode::kNotRealizable: return "not-realizable";
    case ErrorCode::kCatalogTooLarge: return "catalog-too-large";
    case ErrorCode::kParseError: return "parse-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace clansim
