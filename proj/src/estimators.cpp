#include "otcimpact/estimators.hpp"

#include "otcimpact/signing.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "otcimpact/fit.hpp"

namespace otcimpact {
namespace {

void require_longer(std::size_t n, std::size_t max_lag, const char* what) {
  if (n <= max_lag) {
    throw Error(ErrorCode::kTooShort, std::string(what) + ": " + std::to_string(n) +
                                          " samples do not exceed max lag " +
                                          std::to_string(max_lag));
  }
}

bool same_session(std::span<const std::int64_t> sessions, std::size_t a, std::size_t b) {
  return sessions.empty() || sessions[a] == sessions[b];
}

void check_sessions(std::span<const std::int64_t> sessions, std::size_t n) {
  if (!sessions.empty() && sessions.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "session ids do not match trade count");
  }
}

Timestamp floor_div(Timestamp a, Timestamp b) {
  Timestamp q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Timestamp month_start(Timestamp ts) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_time<nanoseconds>(nanoseconds(ts)));
  const year_month_day ymd(day);
  const sys_days first = ymd.year() / ymd.month() / 1;
  return duration_cast<nanoseconds>(first.time_since_epoch()).count();
}

Timestamp next_month(Timestamp start) {
  using namespace std::chrono;
  const year_month_day ymd(floor<days>(sys_time<nanoseconds>(nanoseconds(start))));
  const sys_days next = (ymd.year() / ymd.month() / 1) + months(1);
  return duration_cast<nanoseconds>(sys_days(next).time_since_epoch()).count();
}

}  // namespace

std::vector<std::int64_t> session_ids(std::span<const SignedTrade> trades,
                                      Timestamp session_length) {
  if (session_length <= 0) throw Error(ErrorCode::kInvalidConfig, "session length must be > 0");
  std::vector<std::int64_t> out;
  out.reserve(trades.size());
  for (const auto& st : trades) out.push_back(floor_div(st.trade.ts, session_length));
  return out;
}

LagCurve autocorr(std::span<const Sign> eps, std::size_t max_lag,
                  std::span<const std::int64_t> sessions) {
  require_longer(eps.size(), max_lag, "autocorr");
  check_sessions(sessions, eps.size());
  const std::size_t n = eps.size();
  LagCurve c(CurveKind::kAutocorr, max_lag);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      if (!same_session(sessions, t, t + lag)) continue;
      sum += static_cast<double>(eps[t]) * static_cast<double>(eps[t + lag]);
      ++count;
    }
    c.values[lag] = count > 0 ? sum / static_cast<double>(count) : 0.0;
    c.counts[lag] = count;
  }
  return c;
}

LagCurve response(std::span<const SignedTrade> trades, std::size_t max_lag,
                  std::span<const std::int64_t> sessions) {
  require_longer(trades.size(), max_lag, "response");
  check_sessions(sessions, trades.size());
  const std::size_t n = trades.size();
  LagCurve r(CurveKind::kResponse, max_lag);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      if (!same_session(sessions, t, t + lag)) continue;
      sum += (trades[t + lag].mid_before - trades[t].mid_before) *
             static_cast<double>(trades[t].eps);
      ++count;
    }
    r.values[lag] = count > 0 ? sum / static_cast<double>(count) : 0.0;
    r.counts[lag] = count;
  }
  return r;
}

double n_eff(const LagCurve& c, std::size_t l_sum) {
  if (c.values.size() <= l_sum) {
    throw Error(ErrorCode::kTooShort, "n_eff truncation " + std::to_string(l_sum) +
                                          " exceeds curve max lag " +
                                          std::to_string(c.max_lag()));
  }
  double sum = 0.0;
  for (std::size_t lag = 0; lag <= l_sum; ++lag) sum += c.values[lag];
  return sum;
}

double n_eff_fitted(const FitParams& decay_fit, double c0) {
  double sum = c0;
  for (std::size_t lag = 1; lag <= 1'000'000; ++lag) {
    const double term = eval_fit(decay_fit, static_cast<double>(lag));
    sum += term;
    if (std::abs(term) < 1e-12 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

LagCurve cumulative(const LagCurve& c) {
  LagCurve out = c;
  out.kind = CurveKind::kCumulative;
  double sum = 0.0;
  for (std::size_t lag = 0; lag < c.values.size(); ++lag) {
    sum += c.values[lag];
    out.values[lag] = sum;
  }
  return out;
}

bool is_labeled(const SignedTrade& st) { return st.trade.true_sign.has_value(); }

LagCurve subsample_autocorr(std::span<const SignedTrade> trades, const TradePredicate& in_subset,
                            std::size_t max_lag) {
  require_longer(trades.size(), max_lag, "subsample_autocorr");
  const std::size_t n = trades.size();
  std::vector<bool> member(n);
  bool any = false;
  for (std::size_t t = 0; t < n; ++t) {
    member[t] = in_subset(trades[t]);
    any = any || member[t];
  }
  if (!any) throw Error(ErrorCode::kNoLabels, "subset is empty");

  LagCurve c(CurveKind::kAutocorr, max_lag);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double sum_first = 0.0;
    double sum_second = 0.0;
    std::int64_t n_first = 0;
    std::int64_t n_second = 0;
    std::int64_t n_either = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      const double prod = static_cast<double>(trades[t].eps) * trades[t + lag].eps;
      if (member[t]) {
        sum_first += prod;
        ++n_first;
      }
      if (member[t + lag]) {
        sum_second += prod;
        ++n_second;
      }
      if (member[t] || member[t + lag]) ++n_either;
    }
    double v = 0.0;
    if (n_first > 0 && n_second > 0) {
      v = (sum_first / static_cast<double>(n_first) + sum_second / static_cast<double>(n_second)) /
          2.0;
    } else if (n_first > 0) {
      v = sum_first / static_cast<double>(n_first);
    } else if (n_second > 0) {
      v = sum_second / static_cast<double>(n_second);
    }
    c.values[lag] = v;
    c.counts[lag] = n_either;
  }
  return c;
}

std::vector<WindowStats> windowed_stats(std::span<const SignedTrade> trades, const WindowSpec& spec,
                                        const WindowOptions& options) {
  std::vector<WindowStats> out;
  if (trades.empty()) return out;
  if (spec.kind == WindowSpec::Kind::kFixed && spec.width_ns <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "window width must be > 0", "window");
  }
  auto start_of = [&](Timestamp ts) {
    return spec.kind == WindowSpec::Kind::kFixed ? floor_div(ts, spec.width_ns) * spec.width_ns
                                                 : month_start(ts);
  };
  auto end_of = [&](Timestamp start) {
    return spec.kind == WindowSpec::Kind::kFixed ? start + spec.width_ns : next_month(start);
  };

  const std::size_t need = std::max({options.max_lag, options.l_sum, options.lag_star});
  const std::size_t lag_max = std::max(options.max_lag, options.l_sum);
  const Timestamp last_ts = trades.back().trade.ts;
  std::size_t begin = 0;
  for (Timestamp start = start_of(trades.front().trade.ts); start <= last_ts;
       start = end_of(start)) {
    WindowStats w;
    w.window_start = start;
    w.window_end = end_of(start);
    std::size_t end = begin;
    while (end < trades.size() && trades[end].trade.ts < w.window_end) ++end;
    w.n_trades = end - begin;
    w.low_sample = w.n_trades < 10 * options.lag_star;
    if (w.n_trades > need) {
      const auto window = trades.subspan(begin, w.n_trades);
      const auto eps = signs_of(window);
      const auto c = autocorr(eps, lag_max);
      w.n_eff = n_eff(c, options.l_sum);
      w.r_at = response(window, options.lag_star)[options.lag_star];
      auto cum = cumulative(c);
      cum.values.resize(options.l_sum + 1);
      cum.counts.resize(options.l_sum + 1);
      w.cum_autocorr = std::move(cum);
    }
    out.push_back(std::move(w));
    begin = end;
  }
  return out;
}

std::vector<SizeDistribution> size_distribution(std::span<const Trade> trades,
                                                const CategoryScheme& scheme,
                                                const SizeGrid& grid) {
  if (grid.n_bins == 0 || !(grid.width > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "size grid needs positive width and bins");
  }
  const auto cats = assign_all(trades, scheme);
  std::vector<SizeDistribution> out(scheme.size());
  std::vector<double> sums(scheme.size(), 0.0);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    ++out[cats[i]].n;
    sums[cats[i]] += trades[i].notional;
  }
  for (std::size_t c = 0; c < scheme.size(); ++c) {
    auto& d = out[c];
    d.category = scheme.categories[c];
    if (d.n == 0) {
      throw Error(ErrorCode::kEmptyCategory, "category '" + d.category + "' has no trades",
                  d.category);
    }
    d.mean_notional = sums[c] / static_cast<double>(d.n);
    d.edges.resize(grid.n_bins + 1);
    for (std::size_t k = 0; k <= grid.n_bins; ++k) d.edges[k] = grid.width * static_cast<double>(k);
    d.mass.assign(grid.n_bins, 0.0);
  }
  const double top = grid.width * static_cast<double>(grid.n_bins);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    auto& d = out[cats[i]];
    const double x = trades[i].notional / d.mean_notional;
    const double w = 1.0 / static_cast<double>(d.n);
    if (x >= top) {
      d.overflow_mass += w;
    } else {
      const auto k = std::min(grid.n_bins - 1, static_cast<std::size_t>(x / grid.width));
      d.mass[k] += w;
    }
  }
  return out;
}

std::vector<BinRecord> bin_imbalance(std::span<const SignedTrade> trades,
                                     const RebasedSeries& series, Timestamp width) {
  if (width <= 0) throw Error(ErrorCode::kInvalidConfig, "bin width must be > 0", "width");
  std::vector<BinRecord> out;
  if (trades.empty()) return out;
  const Timestamp first = floor_div(trades.front().trade.ts, width) * width;
  const Timestamp last = floor_div(trades.back().trade.ts, width) * width;
  std::size_t t = 0;
  for (Timestamp start = first; start <= last; start += width) {
    const Timestamp end = start + width;
    BinRecord b;
    b.bin_start = start;
    while (t < trades.size() && trades[t].trade.ts < end) {
      b.imbalance += static_cast<double>(trades[t].eps) * trades[t].trade.notional;
      ++b.n_trades;
      ++t;
    }
    const auto m_start = mid_at_or_before(start, series);
    const auto m_end = mid_at_or_before(end, series);
    if (!m_start || !m_end) continue;
    b.ret = *m_end - *m_start;
    out.push_back(b);
  }
  return out;
}

std::vector<ProfilePoint> bin_profile(std::span<const BinRecord> bins, std::size_t n_groups,
                                      double clip) {
  if (n_groups == 0) throw Error(ErrorCode::kInvalidConfig, "n_groups must be > 0");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& b : bins) {
    if (b.n_trades == 0) continue;
    xs.push_back(b.imbalance);
    ys.push_back(b.ret);
  }
  if (xs.size() < n_groups) {
    throw Error(ErrorCode::kTooFewBins, std::to_string(xs.size()) + " non-empty bins for " +
                                            std::to_string(n_groups) + " groups");
  }
  const double n = static_cast<double>(xs.size());
  const double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  double abs_y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ss += (xs[i] - mean_x) * (xs[i] - mean_x);
    abs_y += std::abs(ys[i]);
  }
  const double sd_x = std::sqrt(ss / n);
  abs_y /= n;
  if (!(sd_x > 0.0) || !(abs_y > 0.0)) {
    throw Error(ErrorCode::kTooFewBins, "imbalance or return has zero scale");
  }

  std::vector<std::pair<double, double>> pts;
  pts.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i] / sd_x;
    if (std::abs(x) > clip) continue;
    pts.emplace_back(x, ys[i] / abs_y);
  }
  if (pts.size() < n_groups) {
    throw Error(ErrorCode::kTooFewBins, "too few bins left after clipping");
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<ProfilePoint> out(n_groups);
  const std::size_t total = pts.size();
  for (std::size_t g = 0; g < n_groups; ++g) {
    const std::size_t lo = g * total / n_groups;
    const std::size_t hi = (g + 1) * total / n_groups;
    auto& p = out[g];
    p.n = hi - lo;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      sx += pts[i].first;
      sy += pts[i].second;
    }
    p.mean_x = sx / static_cast<double>(p.n);
    p.mean_y = sy / static_cast<double>(p.n);
    if (p.n > 1) {
      double var = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        var += (pts[i].second - p.mean_y) * (pts[i].second - p.mean_y);
      }
      p.stderr_y = std::sqrt(var / static_cast<double>(p.n - 1) / static_cast<double>(p.n));
    }
  }
  return out;
}

}  // namespace otcimpact
