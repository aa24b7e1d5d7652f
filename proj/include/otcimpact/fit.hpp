#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "otcimpact/domain.hpp"

namespace otcimpact {

struct FitOptions {
  std::size_t lag_min = 1;
  std::optional<std::size_t> lag_max;  // default: curve max lag
  bool count_weighted = false;
  std::size_t n_starts = 16;
  std::uint64_t seed = 20160831;
  std::size_t max_evaluations = 100'000;  // shared across starts
  double tolerance = 1e-10;               // simplex diameter, relative
};

/// Least-squares fit of a stretched exponential to curve values on
/// [lag_min, lag_max]. The amplitude a is solved in closed form for each
/// (b, nu); a Nelder-Mead simplex searches (log b, log nu) from n_starts
/// seeded starting points. Throws TOO_FEW_POINTS below 8 lags and
/// NON_CONVERGED when no start converges within its share of the budget.
FitParams fit_stretched(const LagCurve& curve, FitForm form, const FitOptions& options = {});

/// f(lag); f(0) = a for DECAY and 0 for SATURATING.
double eval_fit(const FitParams& params, double lag);

/// f sampled on 0..max_lag. For DECAY curves with pin_origin, v(0) is 1.
LagCurve fitted_curve(const FitParams& params, CurveKind kind, std::size_t max_lag,
                      bool pin_origin = false);

}  // namespace otcimpact
