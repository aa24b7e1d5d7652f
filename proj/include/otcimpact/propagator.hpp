#pragma once

#include <cstddef>
#include <vector>

#include "otcimpact/domain.hpp"

namespace otcimpact {

struct SolverOptions {
  /// Above this condition number of the normal matrix a ridge
  /// lambda = ridge_scale * trace is added to its diagonal.
  double ridge_condition = 1e10;
  double ridge_scale = 1e-8;
  /// Still above this after the ridge: SINGULAR_SYSTEM.
  double singular_condition = 1e14;
};

struct KernelSolution {
  std::size_t K = 0;
  /// g[k] = G(k) - G(k-1) for k = 1..K; g[0] = 0.
  std::vector<double> g;
  /// Cumulative propagator on lags 0..L (L = input max lag). Lags beyond K
  /// hold the plateau G(K).
  LagCurve G;
  /// ||A g - D|| of the increment system.
  double residual_norm = 0.0;
  double condition = 0.0;
  bool ridge_applied = false;
};

/// K = L / 2, the default truncation.
std::size_t default_truncation(std::size_t max_lag);

/// Solves D(l) = R(l+1) - R(l) = sum_{k=1..K} g(k) C(|l-k+1|), l = 0..L-1, in
/// the least-squares sense via the normal equations. C is zero beyond its max
/// lag. Throws DIMENSION_MISMATCH unless c and r share L >= K >= 1, and
/// SINGULAR_SYSTEM when the system cannot be conditioned.
KernelSolution solve_propagator(const LagCurve& c, const LagCurve& r, std::size_t K,
                                const SolverOptions& options = {});

/// R(l) = sum_{0<n<=l} G(n) C(l-n) + sum_{n>0} [G(n+l) - G(n)] C(n) on lags
/// 0..c.max_lag(), with C zero-padded and G held at its plateau beyond K.
LagCurve forward_response(const KernelSolution& solution, const LagCurve& c);

/// Large-lag lower bound R(l) / (2 n_eff - 1).
double bound_lower(double r_at, double n_eff);
/// Large-lag upper bound R(l) / n_eff.
double bound_upper(double r_at, double n_eff);

}  // namespace otcimpact
