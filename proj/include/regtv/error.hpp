#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regtv {

enum class ErrorCode {
  NonMonotoneTimes,
  NonFiniteValue,
  TooShort,
  LengthMismatch,
  OutOfRange,
  InvalidParameter,
  KTooLarge,
  TooManyPoints,
  PartitionNotOnGrid,
  TraceMismatch,
  TooFewStops,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonMonotoneTimes: return "NonMonotoneTimes";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::TooManyPoints: return "TooManyPoints";
    case ErrorCode::PartitionNotOnGrid: return "PartitionNotOnGrid";
    case ErrorCode::TraceMismatch: return "TraceMismatch";
    case ErrorCode::TooFewStops: return "TooFewStops";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// All library failures are reported through this exception; code() names the
// failed precondition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regtv
