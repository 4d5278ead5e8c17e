#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace latsec {

enum class ErrorCode {
  NotPrime,
  RankDeficientG,
  NotUnimodular,
  NonPositiveScale,
  InvalidArgument,
  DimensionMismatch,
  BudgetExceeded,
  DegenerateCodebook,
  NonDivisibleBins,
  LayerNotNested,
  EmptyCodebook,
  SupportMismatch,
  UnityGain,
  StageConditionViolated,
  ParseError,
  ValidationError,
  IoError,
  Overflow,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library. `detail` carries the failing
// stage (StageConditionViolated) or line number (ParseError); `field`
// names the offending configuration key where one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::int64_t detail = 0,
        std::string field = {});

  ErrorCode code() const noexcept { return code_; }
  std::int64_t detail() const noexcept { return detail_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::int64_t detail_;
  std::string field_;
};

}  // namespace latsec
