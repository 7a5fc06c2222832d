#include "furrow/error.hpp"

namespace furrow {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kNoStartRow: return "no_start_row";
    case ErrorCode::kInsufficientPoints: return "insufficient_points";
    case ErrorCode::kAllDegenerate: return "all_degenerate";
    case ErrorCode::kDegenerateCamera: return "degenerate_camera";
    case ErrorCode::kHorizonOrAbove: return "horizon_or_above";
    case ErrorCode::kBehindCamera: return "behind_camera";
    case ErrorCode::kOutOfFrame: return "out_of_frame";
    case ErrorCode::kLookaheadNotVisible: return "lookahead_not_visible";
    case ErrorCode::kEmptyDataset: return "empty_dataset";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

}  // namespace furrow
