#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trendlab {

enum class ErrorKind {
  InvalidMatrix,
  NotPositiveDefinite,
  InvalidModel,
  InvalidIndex,
  InvalidInput,
  NothingToRoll,
  DegenerateVariance,
  DegenerateVolatility,
  ZeroTargetVector,
  CannotScale,
  InsufficientData,
  DegenerateResult,
  TooEarly,
  DegenerateForm,
  IngestError,
  ConfigError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::InvalidIndex: return "InvalidIndex";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NothingToRoll: return "NothingToRoll";
    case ErrorKind::DegenerateVariance: return "DegenerateVariance";
    case ErrorKind::DegenerateVolatility: return "DegenerateVolatility";
    case ErrorKind::ZeroTargetVector: return "ZeroTargetVector";
    case ErrorKind::CannotScale: return "CannotScale";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::DegenerateResult: return "DegenerateResult";
    case ErrorKind::TooEarly: return "TooEarly";
    case ErrorKind::DegenerateForm: return "DegenerateForm";
    case ErrorKind::IngestError: return "IngestError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (and the
/// CLI exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trendlab
