#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace efron {

enum class ErrorCode {
  BadParameter,
  NonConvergence,
  NonFiniteEvaluation,
  NormalizationFailure,
  EmptySlice,
  HypothesisViolation,
  InconsistentDerivatives,
  QuantileInversion,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::NormalizationFailure: return "NormalizationFailure";
    case ErrorCode::EmptySlice: return "EmptySlice";
    case ErrorCode::HypothesisViolation: return "HypothesisViolation";
    case ErrorCode::InconsistentDerivatives: return "InconsistentDerivatives";
    case ErrorCode::QuantileInversion: return "QuantileInversion";
  }
  return "Unknown";
}

}  // namespace efron
