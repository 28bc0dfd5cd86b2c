#include "error.hpp"

namespace fpm {

const char* errorCodeName(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kOk: return "OK";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kIo: return "IO";
    case ErrorCode::kOutOfBounds: return "OUT_OF_BOUNDS";
    case ErrorCode::kEmptyRoi: return "EMPTY_ROI";
    case ErrorCode::kTruncatedRidge: return "TRUNCATED_RIDGE";
    case ErrorCode::kTooFewMinutiae: return "TOO_FEW_MINUTIAE";
    case ErrorCode::kNotEnrollable: return "NOT_ENROLLABLE";
    case ErrorCode::kEmptyTemplate: return "EMPTY_TEMPLATE";
    case ErrorCode::kCorruptTemplate: return "CORRUPT_TEMPLATE";
    case ErrorCode::kSpecTooLarge: return "SPEC_TOO_LARGE";
    case ErrorCode::kSpecInfeasible: return "SPEC_INFEASIBLE";
    case ErrorCode::kEmptyScoreList: return "EMPTY_SCORE_LIST";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kInternal: return "INTERNAL";
  }
  return "UNKNOWN";
}

}  // namespace fpm
