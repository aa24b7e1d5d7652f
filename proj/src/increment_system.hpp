#pragma once

// Least-squares machinery shared by the single and multi-category propagator
// solvers. Differencing the linear impact model
//
//   m_t = sum_{t'<t} G_{pi(t')}(t - t') eps_{t'} + noise
//
// one step gives m_{t+l+1} - m_{t+l} = sum_{k>=1} g_{pi}(k) eps_{t+l+1-k}.
// Multiplying by xi^pi_t = eps_t 1[pi_t = pi] and averaging:
//
//   D_pi(l) = sum_rho sum_{k=1..K} g_rho(k) Chat_{rho pi}(l - k + 1)
//
// with Chat_{rho pi}(l) = <xi^rho_{t+l} xi^pi_t> and
// Chat_{rho pi}(-l) = Chat_{pi rho}(l). With a single category this is the
// differenced response/autocorrelation relation for one propagator.

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "otcimpact/propagator.hpp"

namespace otcimpact::detail {

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;
  double condition = 0.0;
  bool ridge_applied = false;
};

/// Solves min ||A x - y|| through A^T A x = A^T y with ridge fallback.
LeastSquaresResult solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                          const SolverOptions& options);

/// corr(rho, pi, lag) returns Chat_{rho pi}(lag) for lag >= 0 and zero beyond
/// the measured range. rhs(pi, l) returns D_pi(l). Rows are ordered (pi, l),
/// columns (rho, k).
Eigen::MatrixXd assemble_increment_matrix(
    std::size_t n_categories, std::size_t n_rows_per_category, std::size_t K,
    const std::function<double(std::size_t, std::size_t, std::size_t)>& corr);

/// Expands solved increments of one category into a KernelSolution on 0..L.
KernelSolution expand_solution(const Eigen::VectorXd& x, std::size_t offset, std::size_t K,
                               std::size_t max_lag);

}  // namespace otcimpact::detail
