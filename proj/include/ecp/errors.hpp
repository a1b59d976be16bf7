#pragma once

#include <stdexcept>
#include <string>

namespace ecp {

enum class ErrorKind {
  EmptyState,
  BasisMismatch,
  ArityMismatch,
  NonUnitaryGate,
  UnknownSlot,
  IncompleteTable,
  NonUnitPhase,
  BadPartition,
  LayoutMismatch,
  SingularDenominator,
  PurePhaseApproxViolated,
  BadCoefficients,
  MalformedInput,
  DegenerateVariance,
  IoError,
  InvalidArgument,
  InternalCheckFailed,
};

constexpr const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyState: return "EmptyState";
    case ErrorKind::BasisMismatch: return "BasisMismatch";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::NonUnitaryGate: return "NonUnitaryGate";
    case ErrorKind::UnknownSlot: return "UnknownSlot";
    case ErrorKind::IncompleteTable: return "IncompleteTable";
    case ErrorKind::NonUnitPhase: return "NonUnitPhase";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::PurePhaseApproxViolated: return "PurePhaseApproxViolated";
    case ErrorKind::BadCoefficients: return "BadCoefficients";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InternalCheckFailed: return "InternalCheckFailed";
  }
  return "UnknownError";
}

// Single exception type for all library errors. `kind()` identifies the
// violated contract; the CLI maps InternalCheckFailed to exit code 3 and
// everything else to 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ecp
