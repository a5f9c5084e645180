#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace divergelab {

enum class ErrorCode {
  kNotHermitian,
  kNotPSD,
  kTraceNotOne,
  kDimensionMismatch,
  kDomainError,
  kNonFinite,
  kBadRank,
  kBadMu,
  kSizeMismatch,
  kInvalidDistribution,
  kWeightError,
  kNotUnitary,
  kInvalidState,
  kNotOrthonormal,
  kNotTracePreserving,
  kFactorizationFailed,
  kOutputInvalid,
  kNotCommuting,
  kInternalConsistency,
  kParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries the violated invariant as a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace divergelab
