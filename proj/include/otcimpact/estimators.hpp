#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcimpact/category.hpp"
#include "otcimpact/domain.hpp"
#include "otcimpact/ingest.hpp"

namespace otcimpact {

// Lags are in trade time. Each estimator optionally takes one session id per
// trade; when given, pairs (t, t+l) from different sessions are skipped.
// Every per-lag mean runs over t in increasing order so results are
// bit-reproducible.

/// Session id per trade: floor(ts / session_length).
std::vector<std::int64_t> session_ids(std::span<const SignedTrade> trades,
                                      Timestamp session_length = kNanosPerDay);

/// C(l) = <eps_t eps_{t+l}>. Throws TOO_SHORT unless eps.size() > max_lag.
LagCurve autocorr(std::span<const Sign> eps, std::size_t max_lag,
                  std::span<const std::int64_t> sessions = {});

/// R(l) = <(m_{t+l} - m_t) eps_t> with m_t the mid prevailing before trade t.
LagCurve response(std::span<const SignedTrade> trades, std::size_t max_lag,
                  std::span<const std::int64_t> sessions = {});

/// Sum of c(0..l_sum).
double n_eff(const LagCurve& c, std::size_t l_sum);

/// c(0) plus the fitted tail sum_{l>=1} f(l), summed until terms drop below
/// 1e-12 of the running total (at most 10^6 lags).
double n_eff_fitted(const FitParams& decay_fit, double c0 = 1.0);

/// Running sum of c, kind CUMULATIVE.
LagCurve cumulative(const LagCurve& c);

using TradePredicate = std::function<bool(const SignedTrade&)>;

/// Trades carrying a true_sign label.
bool is_labeled(const SignedTrade& st);

/// v(l) = [<eps_t eps_{t+l}>_{t in S} + <eps_t eps_{t+l}>_{t+l in S}] / 2.
/// When only one of the two averages has samples at a lag, that one is used.
/// counts(l) is the number of distinct pairs with at least one end in S.
LagCurve subsample_autocorr(std::span<const SignedTrade> trades, const TradePredicate& in_subset,
                            std::size_t max_lag);

struct WindowSpec {
  enum class Kind { kFixed, kCalendarMonth };
  Kind kind = Kind::kCalendarMonth;
  Timestamp width_ns = 30 * kNanosPerDay;  // kFixed only; windows align to multiples
};

struct WindowOptions {
  std::size_t max_lag = 100;
  std::size_t l_sum = 100;
  std::size_t lag_star = 30;
};

struct WindowStats {
  Timestamp window_start = 0;
  Timestamp window_end = 0;  // exclusive
  std::size_t n_trades = 0;
  /// Fewer than 10 * lag_star trades.
  bool low_sample = false;
  std::optional<double> n_eff;
  std::optional<double> r_at;
  std::optional<LagCurve> cum_autocorr;
};

/// Statistics per window, from the first trade's window through the last
/// one's. Windows with no more than max(max_lag, l_sum, lag_star) trades carry
/// no statistics.
std::vector<WindowStats> windowed_stats(std::span<const SignedTrade> trades, const WindowSpec& spec,
                                        const WindowOptions& options = {});

struct SizeGrid {
  double width = 0.25;
  std::size_t n_bins = 40;
};

struct SizeDistribution {
  std::string category;
  std::size_t n = 0;
  double mean_notional = 0.0;
  std::vector<double> edges;  // n_bins + 1 edges of Q / mean(Q)
  std::vector<double> mass;   // fraction of trades per bin
  double overflow_mass = 0.0; // fraction beyond the last edge
};

/// Per-category histogram of Q / mean(Q). Throws EMPTY_CATEGORY.
std::vector<SizeDistribution> size_distribution(std::span<const Trade> trades,
                                                const CategoryScheme& scheme,
                                                const SizeGrid& grid = {});

/// Clock-time bins [start, start + width) aligned to multiples of width, from
/// the first trade's bin to the last one's. ret uses the last mid at or before
/// each boundary; leading bins without a quote at their start are skipped.
std::vector<BinRecord> bin_imbalance(std::span<const SignedTrade> trades,
                                     const RebasedSeries& series, Timestamp width);

struct ProfilePoint {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double stderr_y = 0.0;
  std::size_t n = 0;
};

/// x = I/std(I), y = r/<|r|> over non-empty bins; drops |x| > clip; groups
/// the rest by rank of x into n_groups near-equal groups.
std::vector<ProfilePoint> bin_profile(std::span<const BinRecord> bins, std::size_t n_groups = 30,
                                      double clip = 3.0);

}  // namespace otcimpact
