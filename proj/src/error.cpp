#include "ssd/error.hpp"

namespace ssd {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kZeroColumn: return "zero-column";
    case ErrorCode::kNumericDivergence: return "numeric-divergence";
    case ErrorCode::kStepSearchFailure: return "step-search-failure";
    case ErrorCode::kDegenerateDictionary: return "degenerate-dictionary";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace ssd
