#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qinsure {

enum class ErrorCode {
  InvalidArgument,
  OutOfRange,
  DimensionMismatch,
  NonUnitary,
  QubitBudget,
  MissingRealization,
  InvalidScenario,
  Overflow,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::InvalidArgument:
    return "invalid_argument";
  case ErrorCode::OutOfRange:
    return "out_of_range";
  case ErrorCode::DimensionMismatch:
    return "dimension_mismatch";
  case ErrorCode::NonUnitary:
    return "non_unitary";
  case ErrorCode::QubitBudget:
    return "qubit_budget";
  case ErrorCode::MissingRealization:
    return "missing_realization";
  case ErrorCode::InvalidScenario:
    return "invalid_scenario";
  case ErrorCode::Overflow:
    return "overflow";
  }
  return "unknown";
}

/// All precondition failures in the library are reported with this type.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) {
    throw Error(code, message);
  }
}

} // namespace qinsure
