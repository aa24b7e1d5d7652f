#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otcimpact/error.hpp"

namespace otcimpact {

/// Integer nanoseconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;
inline constexpr Timestamp kNoTimestamp = std::numeric_limits<Timestamp>::min();

inline constexpr Timestamp kNanosPerSecond = 1'000'000'000;
inline constexpr Timestamp kNanosPerDay = 86'400 * kNanosPerSecond;

/// Trade sign: +1 buyer initiated, -1 seller initiated. Zero only appears as
/// padding in synthetic sign sequences.
using Sign = std::int8_t;

/// Rebased prices are expressed in basis points of the typical spread.
inline constexpr double kRebaseLevel = 1.0e4;

enum class Venue : std::uint8_t { kUnknown, kOnSef, kOffSef };

std::string_view to_string(Venue venue);
/// Accepts "ON_SEF", "OFF_SEF", "UNKNOWN" (case-insensitive) or blank.
std::optional<Venue> parse_venue(std::string_view text);

struct Trade {
  std::uint64_t id = 0;
  Timestamp ts = kNoTimestamp;
  std::string product;
  double spread = 0.0;    // bps
  double notional = 0.0;  // currency units
  Venue venue = Venue::kUnknown;
  std::optional<Sign> true_sign;
};

struct Quote {
  Timestamp ts = kNoTimestamp;
  std::string product;
  double spread = 0.0;  // bps
};

struct RebasedPoint {
  Timestamp ts = 0;
  double m = 0.0;
};

/// Indicative mids rebased to m = 1e4 * s / <s>.
struct RebasedSeries {
  std::string product;
  double mean_spread = 0.0;
  std::vector<RebasedPoint> points;
};

struct SignedTrade {
  Trade trade;
  double mid_before = 0.0;
  Sign eps = 1;
  bool tie = false;
};

enum class CurveKind { kAutocorr, kResponse, kPropagator, kCumulative, kStepResponse };

std::string_view to_string(CurveKind kind);

/// A function of trade-time lag 0..max_lag with the number of samples that
/// went into each lag.
struct LagCurve {
  CurveKind kind = CurveKind::kAutocorr;
  std::vector<double> values;
  std::vector<std::int64_t> counts;

  LagCurve() = default;
  LagCurve(CurveKind k, std::size_t max_lag)
      : kind(k), values(max_lag + 1, 0.0), counts(max_lag + 1, 0) {}

  std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
  double operator[](std::size_t lag) const { return values[lag]; }
};

enum class FitForm { kDecay, kSaturating };

std::string_view to_string(FitForm form);
std::optional<FitForm> parse_fit_form(std::string_view text);

/// Stretched exponential a*exp(-(b*l)^nu) (DECAY) or a*[1-exp(-(b*l)^nu)]
/// (SATURATING).
struct FitParams {
  FitForm form = FitForm::kDecay;
  double a = 0.0;
  double b = 1.0;
  double nu = 1.0;
  double sse = 0.0;
  std::size_t lag_min = 1;
  std::size_t lag_max = 0;
  std::size_t evaluations = 0;
  /// Set when every fitted lag sits on the asymptote (b*lag_min)^nu >> 1, so b
  /// and nu are not identified.
  bool degenerate = false;
};

struct BinRecord {
  Timestamp bin_start = 0;
  double imbalance = 0.0;  // sum of eps * notional
  double ret = 0.0;        // m(bin end) - m(previous bin end)
  std::int64_t n_trades = 0;
};

struct Violation {
  ErrorCode code;
  std::string field;
};

std::optional<Violation> validate(const Trade& trade);
std::optional<Violation> validate(const Quote& quote);

/// Throws Error carrying the violation, if any.
void ensure_valid(const Trade& trade);
void ensure_valid(const Quote& quote);

}  // namespace otcimpact
