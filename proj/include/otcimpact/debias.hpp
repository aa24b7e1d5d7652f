#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "otcimpact/domain.hpp"
#include "otcimpact/fit.hpp"
#include "otcimpact/propagator.hpp"

namespace otcimpact {

// Corrections for sign misclassification. A detected sign is
// eps_t = eps_true_t (2 q_t - 1) with q_t = 1 when the classifier is right;
// with errors independent of the signs and of future returns, every
// expectation linear in a detected sign shrinks by (2 <q> - 1).

/// v(l >= 1) = <eps_true_t eps_{t+l}>_{t labeled} / (2 q_hat - 1); v(0) = 1.
/// Throws Q_TOO_LOW for q_hat <= 0.5 and NO_LABELS without labeled trades.
LagCurve c_true(std::span<const SignedTrade> trades, double q_hat, std::size_t max_lag);

/// r / (2 q_hat - 1), elementwise.
LagCurve r_true(const LagCurve& r, double q_hat);

struct CorrectedSolution {
  KernelSolution solution;
  std::optional<FitParams> c_fit;  // set when fit_first
  std::optional<FitParams> r_fit;
  LagCurve c_used;
  LagCurve r_used;
};

/// Propagator from corrected curves. With fit_first the curves are first
/// replaced by their DECAY (C, v(0) pinned to 1) and SATURATING (R) fits.
CorrectedSolution g_true(const LagCurve& c_corr, const LagCurve& r_corr, bool fit_first,
                         std::size_t K, const FitOptions& fit_options = {},
                         const SolverOptions& solver_options = {});

}  // namespace otcimpact
