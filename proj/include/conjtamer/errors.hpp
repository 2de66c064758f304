#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace conjtamer {

enum class ErrorCode {
  InvalidSpace,
  NonMonotone,
  DegenerateDerivative,
  SpaceMismatch,
  NonFinite,
  SizeOverflow,
  NoAdmissibleRadius,
  UnknownGenerator,
  NonConfluent,
  LambdaOutOfRange,
  NotPeriodic,
  NotCircle,
  InfiniteHyperbolicSet,
  SyntaxError,
  UnknownFunction,
  RelationViolation,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpace: return "InvalidSpace";
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::NoAdmissibleRadius: return "NoAdmissibleRadius";
    case ErrorCode::UnknownGenerator: return "UnknownGenerator";
    case ErrorCode::NonConfluent: return "NonConfluent";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::NotPeriodic: return "NotPeriodic";
    case ErrorCode::NotCircle: return "NotCircle";
    case ErrorCode::InfiniteHyperbolicSet: return "InfiniteHyperbolicSet";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::RelationViolation: return "RelationViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace conjtamer
