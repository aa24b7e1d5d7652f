#include "otcimpact/propagator.hpp"

#include <cmath>
#include <limits>

#include "increment_system.hpp"

namespace otcimpact {
namespace detail {

LeastSquaresResult solve_normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& y,
                                          const SolverOptions& options) {
  Eigen::MatrixXd normal = a.transpose() * a;
  const Eigen::VectorXd rhs = a.transpose() * y;
  const double trace = normal.trace();
  if (!std::isfinite(trace) || trace <= 0.0 || !rhs.allFinite()) {
    throw Error(ErrorCode::kSingularSystem, "normal matrix is zero or not finite");
  }

  auto condition_of = [](const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  };

  LeastSquaresResult out;
  out.condition = condition_of(normal);
  if (out.condition > options.ridge_condition) {
    normal.diagonal().array() += options.ridge_scale * trace;
    out.ridge_applied = true;
    out.condition = condition_of(normal);
  }
  if (!(out.condition <= options.singular_condition)) {
    throw Error(ErrorCode::kSingularSystem,
                "condition number " + std::to_string(out.condition) + " above threshold");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularSystem, "LDLT factorization failed");
  }
  out.x = ldlt.solve(rhs);
  out.residual_norm = (a * out.x - y).norm();
  return out;
}

Eigen::MatrixXd assemble_increment_matrix(
    std::size_t n_categories, std::size_t n_rows_per_category, std::size_t K,
    const std::function<double(std::size_t, std::size_t, std::size_t)>& corr) {
  const auto rows = static_cast<Eigen::Index>(n_categories * n_rows_per_category);
  const auto cols = static_cast<Eigen::Index>(n_categories * K);
  Eigen::MatrixXd a(rows, cols);
  for (std::size_t pi = 0; pi < n_categories; ++pi) {
    for (std::size_t l = 0; l < n_rows_per_category; ++l) {
      const auto row = static_cast<Eigen::Index>(pi * n_rows_per_category + l);
      for (std::size_t rho = 0; rho < n_categories; ++rho) {
        for (std::size_t k = 1; k <= K; ++k) {
          const auto col = static_cast<Eigen::Index>(rho * K + (k - 1));
          // lag = l - k + 1; negative lags use Chat_{rho pi}(-s) = Chat_{pi rho}(s).
          a(row, col) = (l + 1 >= k) ? corr(rho, pi, l + 1 - k) : corr(pi, rho, k - 1 - l);
        }
      }
    }
  }
  return a;
}

KernelSolution expand_solution(const Eigen::VectorXd& x, std::size_t offset, std::size_t K,
                               std::size_t max_lag) {
  KernelSolution s;
  s.K = K;
  s.g.assign(K + 1, 0.0);
  s.G = LagCurve(CurveKind::kPropagator, max_lag);
  double cum = 0.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    if (lag <= K) {
      s.g[lag] = x(static_cast<Eigen::Index>(offset + lag - 1));
      cum += s.g[lag];
    }
    s.G.values[lag] = cum;
  }
  return s;
}

}  // namespace detail

std::size_t default_truncation(std::size_t max_lag) { return max_lag / 2; }

KernelSolution solve_propagator(const LagCurve& c, const LagCurve& r, std::size_t K,
                                const SolverOptions& options) {
  if (c.values.empty() || c.max_lag() != r.max_lag()) {
    throw Error(ErrorCode::kDimensionMismatch, "C and R must share max lag");
  }
  const std::size_t L = c.max_lag();
  if (K == 0 || K > L) {
    throw Error(ErrorCode::kDimensionMismatch,
                "truncation K=" + std::to_string(K) + " must lie in [1, " + std::to_string(L) + "]");
  }
  const auto a = detail::assemble_increment_matrix(
      1, L, K, [&](std::size_t, std::size_t, std::size_t lag) {
        return lag <= L ? c.values[lag] : 0.0;
      });
  Eigen::VectorXd d(static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l) d(static_cast<Eigen::Index>(l)) = r.values[l + 1] - r.values[l];

  const auto ls = detail::solve_normal_equations(a, d, options);
  auto sol = detail::expand_solution(ls.x, 0, K, L);
  sol.residual_norm = ls.residual_norm;
  sol.condition = ls.condition;
  sol.ridge_applied = ls.ridge_applied;
  return sol;
}

LagCurve forward_response(const KernelSolution& solution, const LagCurve& c) {
  const std::size_t lc = c.max_lag();
  auto G = [&](std::size_t n) {
    return solution.G.values[std::min({n, solution.K, solution.G.max_lag()})];
  };
  LagCurve r(CurveKind::kResponse, lc);
  for (std::size_t l = 0; l <= lc; ++l) {
    double sum = 0.0;
    for (std::size_t n = 1; n <= l; ++n) sum += G(n) * c.values[l - n];
    for (std::size_t n = 1; n <= lc; ++n) sum += (G(n + l) - G(n)) * c.values[n];
    r.values[l] = sum;
  }
  return r;
}

double bound_lower(double r_at, double n_eff) { return r_at / (2.0 * n_eff - 1.0); }

double bound_upper(double r_at, double n_eff) { return r_at / n_eff; }

}  // namespace otcimpact
