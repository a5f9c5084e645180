#include "divergelab/error.hpp"

namespace divergelab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kTraceNotOne: return "TraceNotOne";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kBadRank: return "BadRank";
    case ErrorCode::kBadMu: return "BadMu";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kWeightError: return "WeightError";
    case ErrorCode::kNotUnitary: return "NotUnitary";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kNotOrthonormal: return "NotOrthonormal";
    case ErrorCode::kNotTracePreserving: return "NotTracePreserving";
    case ErrorCode::kFactorizationFailed: return "FactorizationFailed";
    case ErrorCode::kOutputInvalid: return "OutputInvalid";
    case ErrorCode::kNotCommuting: return "NotCommuting";
    case ErrorCode::kInternalConsistency: return "InternalConsistency";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace divergelab
