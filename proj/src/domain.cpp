#include "otcimpact/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace otcimpact {

std::string_view to_string(Venue venue) {
  switch (venue) {
    case Venue::kOnSef: return "ON_SEF";
    case Venue::kOffSef: return "OFF_SEF";
    case Venue::kUnknown: break;
  }
  return "UNKNOWN";
}

std::optional<Venue> parse_venue(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper.empty() || upper == "UNKNOWN") return Venue::kUnknown;
  if (upper == "ON_SEF") return Venue::kOnSef;
  if (upper == "OFF_SEF") return Venue::kOffSef;
  return std::nullopt;
}

std::string_view to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::kAutocorr: return "AUTOCORR";
    case CurveKind::kResponse: return "RESPONSE";
    case CurveKind::kPropagator: return "PROPAGATOR";
    case CurveKind::kCumulative: return "CUMULATIVE";
    case CurveKind::kStepResponse: return "STEP_RESPONSE";
  }
  return "UNKNOWN";
}

std::string_view to_string(FitForm form) {
  return form == FitForm::kDecay ? "DECAY" : "SATURATING";
}

std::optional<FitForm> parse_fit_form(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "decay") return FitForm::kDecay;
  if (lower == "saturating") return FitForm::kSaturating;
  return std::nullopt;
}

namespace {

// NaN fails the comparison and is reported like a non-positive value.
bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::optional<Violation> validate(const Trade& trade) {
  if (trade.ts == kNoTimestamp) return Violation{ErrorCode::kMissingTimestamp, "ts"};
  if (!positive(trade.spread)) return Violation{ErrorCode::kNegativeSpread, "spread"};
  if (!positive(trade.notional)) return Violation{ErrorCode::kNegativeNotional, "notional"};
  return std::nullopt;
}

std::optional<Violation> validate(const Quote& quote) {
  if (quote.ts == kNoTimestamp) return Violation{ErrorCode::kMissingTimestamp, "ts"};
  if (!positive(quote.spread)) return Violation{ErrorCode::kNegativeSpread, "spread"};
  return std::nullopt;
}

void ensure_valid(const Trade& trade) {
  if (auto v = validate(trade)) {
    throw Error(v->code, "trade " + std::to_string(trade.id) + " violates " + v->field, v->field);
  }
}

void ensure_valid(const Quote& quote) {
  if (auto v = validate(quote)) {
    throw Error(v->code, "quote violates " + v->field, v->field);
  }
}

}  // namespace otcimpact
