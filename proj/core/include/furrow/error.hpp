#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace furrow {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kFormat,
  kOutOfBounds,
  kOverflow,
  kNoStartRow,
  kInsufficientPoints,
  kAllDegenerate,
  kDegenerateCamera,
  kHorizonOrAbove,
  kBehindCamera,
  kOutOfFrame,
  kLookaheadNotVisible,
  kEmptyDataset,
  kConfig,
};

/// Stable snake_case name, used in JSON status fields and logs.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace furrow
