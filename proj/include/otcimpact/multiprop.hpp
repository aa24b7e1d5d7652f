#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "otcimpact/category.hpp"
#include "otcimpact/domain.hpp"
#include "otcimpact/propagator.hpp"

namespace otcimpact {

/// Chat_{rho pi}(l) = <xi^rho_{t+l} xi^pi_t> with xi^pi_t = eps_t 1[pi_t = pi],
/// averaged over the n - l pairs at each lag.
struct CrossCorrelation {
  std::vector<std::string> categories;
  std::size_t max_lag = 0;
  std::vector<double> values;        // [rho][pi][l]
  std::vector<std::int64_t> counts;  // pairs per lag
  std::vector<double> frequencies;   // P_pi, share of trades per category

  std::size_t n_categories() const { return categories.size(); }
  /// Any signed lag in [-max_lag, max_lag]; negative lags use the symmetry
  /// Chat_{rho pi}(-l) = Chat_{pi rho}(l).
  double at(std::size_t rho, std::size_t pi, long lag) const;
};

/// Throws EMPTY_CATEGORY if any category of the scheme has no trades.
CrossCorrelation cross_corr(std::span<const SignedTrade> trades, const CategoryScheme& scheme,
                            std::size_t max_lag);

/// R_pi(l) = <(m_{t+l} - m_t) eps_t>_{t : pi_t = pi}, a conditional mean; one
/// curve per category, in scheme order.
std::vector<LagCurve> category_response(std::span<const SignedTrade> trades,
                                        const CategoryScheme& scheme, std::size_t max_lag);

/// C_pi(l) = <eps_{t+l} eps_t>_{t : pi_t = pi}.
std::vector<LagCurve> category_autocorr(std::span<const SignedTrade> trades,
                                        const CategoryScheme& scheme, std::size_t max_lag);

struct MultiKernelSolution {
  std::vector<std::string> categories;
  std::vector<double> frequencies;
  std::vector<KernelSolution> kernels;  // per category, scheme order
  double residual_norm = 0.0;
  double condition = 0.0;
  bool ridge_applied = false;
};

/// Solves the stacked increment system for per-category propagators. The
/// conditional responses are turned back into unconditional ones with the
/// per-lag category shares count_pi(l) / count(l), so a single category
/// reproduces solve_propagator exactly.
MultiKernelSolution solve_multi(const CrossCorrelation& cross, std::span<const LagCurve> responses,
                                std::size_t K, const SolverOptions& options = {});

struct CategoryBound {
  std::string category;
  double n_eff = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// lower = R_pi(lag) / (2 n_pi - 1), upper = R_pi(lag) / n_pi.
std::vector<CategoryBound> category_bounds(std::span<const LagCurve> responses,
                                           std::span<const double> n_effs,
                                           std::span<const std::string> categories,
                                           std::size_t lag);

}  // namespace otcimpact
