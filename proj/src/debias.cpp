#include "otcimpact/debias.hpp"

#include <string>

namespace otcimpact {
namespace {

double shrink_factor(double q_hat) {
  if (!(q_hat > 0.5) || q_hat > 1.0) {
    throw Error(ErrorCode::kQTooLow,
                "q_hat=" + std::to_string(q_hat) + " must lie in (0.5, 1]", "q_hat");
  }
  return 2.0 * q_hat - 1.0;
}

}  // namespace

LagCurve c_true(std::span<const SignedTrade> trades, double q_hat, std::size_t max_lag) {
  const double factor = shrink_factor(q_hat);
  if (trades.size() <= max_lag) {
    throw Error(ErrorCode::kTooShort, "c_true: sequence does not exceed max lag");
  }
  const std::size_t n = trades.size();
  bool any = false;
  for (const auto& st : trades) any = any || st.trade.true_sign.has_value();
  if (!any) throw Error(ErrorCode::kNoLabels, "c_true needs labeled trades");

  LagCurve c(CurveKind::kAutocorr, max_lag);
  c.values[0] = 1.0;
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      const auto& label = trades[t].trade.true_sign;
      if (!label) continue;
      sum += static_cast<double>(*label) * trades[t + lag].eps;
      ++count;
    }
    c.counts[lag] = count;
    if (lag > 0) c.values[lag] = count > 0 ? sum / static_cast<double>(count) / factor : 0.0;
  }
  return c;
}

LagCurve r_true(const LagCurve& r, double q_hat) {
  const double factor = shrink_factor(q_hat);
  LagCurve out = r;
  for (auto& v : out.values) v /= factor;
  return out;
}

CorrectedSolution g_true(const LagCurve& c_corr, const LagCurve& r_corr, bool fit_first,
                         std::size_t K, const FitOptions& fit_options,
                         const SolverOptions& solver_options) {
  CorrectedSolution out;
  if (fit_first) {
    out.c_fit = fit_stretched(c_corr, FitForm::kDecay, fit_options);
    out.r_fit = fit_stretched(r_corr, FitForm::kSaturating, fit_options);
    out.c_used = fitted_curve(*out.c_fit, CurveKind::kAutocorr, c_corr.max_lag(), true);
    out.r_used = fitted_curve(*out.r_fit, CurveKind::kResponse, r_corr.max_lag());
    out.c_used.counts = c_corr.counts;
    out.r_used.counts = r_corr.counts;
  } else {
    out.c_used = c_corr;
    out.r_used = r_corr;
  }
  out.solution = solve_propagator(out.c_used, out.r_used, K, solver_options);
  return out;
}

}  // namespace otcimpact
