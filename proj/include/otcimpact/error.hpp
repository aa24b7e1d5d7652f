#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otcimpact {

enum class ErrorCode {
  kNegativeSpread,
  kNegativeNotional,
  kMissingTimestamp,
  kParseError,
  kSchemaMismatch,
  kEmptyFile,
  kEmptyInput,
  kMixedProducts,
  kNoPriorQuote,
  kNoLabels,
  kTooShort,
  kEmptyCategory,
  kTooFewBins,
  kSingularSystem,
  kDimensionMismatch,
  kQTooLow,
  kNonConverged,
  kTooFewPoints,
  kInvalidConfig,
  kIoError,
};

/// Upper-snake name used in machine-readable error output, e.g. "NO_LABELS".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {},
        long line = 0);

  ErrorCode code() const noexcept { return code_; }
  /// Offending field or column; empty when not applicable.
  const std::string& field() const noexcept { return field_; }
  /// 1-based input line for parse errors, 0 otherwise.
  long line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::string field_;
  long line_;
};

}  // namespace otcimpact
