#include "otcimpact/error.hpp"

namespace otcimpact {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeSpread: return "NEGATIVE_SPREAD";
    case ErrorCode::kNegativeNotional: return "NEGATIVE_NOTIONAL";
    case ErrorCode::kMissingTimestamp: return "MISSING_TIMESTAMP";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kSchemaMismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::kEmptyFile: return "EMPTY_FILE";
    case ErrorCode::kEmptyInput: return "EMPTY_INPUT";
    case ErrorCode::kMixedProducts: return "MIXED_PRODUCTS";
    case ErrorCode::kNoPriorQuote: return "NO_PRIOR_QUOTE";
    case ErrorCode::kNoLabels: return "NO_LABELS";
    case ErrorCode::kTooShort: return "TOO_SHORT";
    case ErrorCode::kEmptyCategory: return "EMPTY_CATEGORY";
    case ErrorCode::kTooFewBins: return "TOO_FEW_BINS";
    case ErrorCode::kSingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kQTooLow: return "Q_TOO_LOW";
    case ErrorCode::kNonConverged: return "NON_CONVERGED";
    case ErrorCode::kTooFewPoints: return "TOO_FEW_POINTS";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message, std::string field, long line)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      field_(std::move(field)),
      line_(line) {}

}  // namespace otcimpact
