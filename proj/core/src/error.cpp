#include "latsec/error.hpp"

#include <utility>

namespace latsec {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPrime: return "NotPrime";
    case ErrorCode::RankDeficientG: return "RankDeficientG";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateCodebook: return "DegenerateCodebook";
    case ErrorCode::NonDivisibleBins: return "NonDivisibleBins";
    case ErrorCode::LayerNotNested: return "LayerNotNested";
    case ErrorCode::EmptyCodebook: return "EmptyCodebook";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::UnityGain: return "UnityGain";
    case ErrorCode::StageConditionViolated: return "StageConditionViolated";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::int64_t detail,
             std::string field)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      detail_(detail),
      field_(std::move(field)) {}

}  // namespace latsec
