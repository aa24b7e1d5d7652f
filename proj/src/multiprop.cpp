#include "otcimpact/multiprop.hpp"

#include "increment_system.hpp"

namespace otcimpact {
namespace {

std::vector<std::size_t> checked_assignment(std::span<const SignedTrade> trades,
                                            const CategoryScheme& scheme, std::size_t max_lag) {
  if (trades.size() <= max_lag) {
    throw Error(ErrorCode::kTooShort, "sequence of " + std::to_string(trades.size()) +
                                          " trades does not exceed max lag " +
                                          std::to_string(max_lag));
  }
  auto cats = assign_all(trades, scheme);
  std::vector<std::size_t> n(scheme.size(), 0);
  for (auto c : cats) ++n[c];
  for (std::size_t c = 0; c < scheme.size(); ++c) {
    if (n[c] == 0) {
      throw Error(ErrorCode::kEmptyCategory,
                  "category '" + scheme.categories[c] + "' has no trades", scheme.categories[c]);
    }
  }
  return cats;
}

}  // namespace

double CrossCorrelation::at(std::size_t rho, std::size_t pi, long lag) const {
  const std::size_t p = n_categories();
  if (lag < 0) return at(pi, rho, -lag);
  const auto l = static_cast<std::size_t>(lag);
  if (l > max_lag) return 0.0;
  return values[(rho * p + pi) * (max_lag + 1) + l];
}

CrossCorrelation cross_corr(std::span<const SignedTrade> trades, const CategoryScheme& scheme,
                            std::size_t max_lag) {
  const auto cats = checked_assignment(trades, scheme, max_lag);
  const std::size_t n = trades.size();
  const std::size_t p = scheme.size();

  CrossCorrelation out;
  out.categories = scheme.categories;
  out.max_lag = max_lag;
  out.values.assign(p * p * (max_lag + 1), 0.0);
  out.counts.assign(max_lag + 1, 0);
  out.frequencies.assign(p, 0.0);
  for (auto c : cats) out.frequencies[c] += 1.0;
  for (auto& f : out.frequencies) f /= static_cast<double>(n);

  std::vector<double> sums(p * p);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t t = 0; t + lag < n; ++t) {
      // xi^rho_{t+lag} xi^pi_t is nonzero only for rho = pi_{t+lag}, pi = pi_t.
      const std::size_t rho = cats[t + lag];
      const std::size_t pi = cats[t];
      sums[rho * p + pi] += static_cast<double>(trades[t].eps) * trades[t + lag].eps;
    }
    const auto count = static_cast<std::int64_t>(n - lag);
    out.counts[lag] = count;
    for (std::size_t k = 0; k < p * p; ++k) {
      out.values[k * (max_lag + 1) + lag] = sums[k] / static_cast<double>(count);
    }
  }
  return out;
}

std::vector<LagCurve> category_response(std::span<const SignedTrade> trades,
                                        const CategoryScheme& scheme, std::size_t max_lag) {
  const auto cats = checked_assignment(trades, scheme, max_lag);
  const std::size_t n = trades.size();
  std::vector<LagCurve> out(scheme.size(), LagCurve(CurveKind::kResponse, max_lag));
  std::vector<double> sums(scheme.size());
  std::vector<std::int64_t> counts(scheme.size());
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t t = 0; t + lag < n; ++t) {
      sums[cats[t]] += (trades[t + lag].mid_before - trades[t].mid_before) *
                       static_cast<double>(trades[t].eps);
      ++counts[cats[t]];
    }
    for (std::size_t c = 0; c < scheme.size(); ++c) {
      out[c].values[lag] = counts[c] > 0 ? sums[c] / static_cast<double>(counts[c]) : 0.0;
      out[c].counts[lag] = counts[c];
    }
  }
  return out;
}

std::vector<LagCurve> category_autocorr(std::span<const SignedTrade> trades,
                                        const CategoryScheme& scheme, std::size_t max_lag) {
  const auto cats = checked_assignment(trades, scheme, max_lag);
  const std::size_t n = trades.size();
  std::vector<LagCurve> out(scheme.size(), LagCurve(CurveKind::kAutocorr, max_lag));
  std::vector<double> sums(scheme.size());
  std::vector<std::int64_t> counts(scheme.size());
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t t = 0; t + lag < n; ++t) {
      sums[cats[t]] += static_cast<double>(trades[t].eps) * trades[t + lag].eps;
      ++counts[cats[t]];
    }
    for (std::size_t c = 0; c < scheme.size(); ++c) {
      out[c].values[lag] = counts[c] > 0 ? sums[c] / static_cast<double>(counts[c]) : 0.0;
      out[c].counts[lag] = counts[c];
    }
  }
  return out;
}

MultiKernelSolution solve_multi(const CrossCorrelation& cross, std::span<const LagCurve> responses,
                                std::size_t K, const SolverOptions& options) {
  const std::size_t p = cross.n_categories();
  if (p == 0 || responses.size() != p) {
    throw Error(ErrorCode::kDimensionMismatch, "need one response curve per category");
  }
  const std::size_t L = cross.max_lag;
  for (const auto& r : responses) {
    if (r.max_lag() != L || r.counts.size() != L + 1) {
      throw Error(ErrorCode::kDimensionMismatch, "response max lag differs from cross-correlation");
    }
  }
  if (K == 0 || K > L) {
    throw Error(ErrorCode::kDimensionMismatch,
                "truncation K=" + std::to_string(K) + " must lie in [1, " + std::to_string(L) + "]");
  }
  for (std::size_t c = 0; c < p; ++c) {
    if (responses[c].counts[0] == 0) {
      throw Error(ErrorCode::kEmptyCategory, "category '" + cross.categories[c] + "' is empty",
                  cross.categories[c]);
    }
  }

  const auto a = detail::assemble_increment_matrix(
      p, L, K, [&](std::size_t rho, std::size_t pi, std::size_t lag) {
        return cross.at(rho, pi, static_cast<long>(lag));
      });

  // Unconditional response sum_t (m_{t+l} - m_t) xi^pi_t / (n - l).
  auto unconditional = [&](std::size_t pi, std::size_t lag) {
    const auto& r = responses[pi];
    if (p == 1) return r.values[lag];
    return r.values[lag] * static_cast<double>(r.counts[lag]) /
           static_cast<double>(cross.counts[lag]);
  };
  Eigen::VectorXd d(static_cast<Eigen::Index>(p * L));
  for (std::size_t pi = 0; pi < p; ++pi) {
    for (std::size_t l = 0; l < L; ++l) {
      d(static_cast<Eigen::Index>(pi * L + l)) = unconditional(pi, l + 1) - unconditional(pi, l);
    }
  }

  const auto ls = detail::solve_normal_equations(a, d, options);
  MultiKernelSolution out;
  out.categories = cross.categories;
  out.frequencies = cross.frequencies;
  out.residual_norm = ls.residual_norm;
  out.condition = ls.condition;
  out.ridge_applied = ls.ridge_applied;
  for (std::size_t rho = 0; rho < p; ++rho) {
    auto k = detail::expand_solution(ls.x, rho * K, K, L);
    k.residual_norm = ls.residual_norm;
    k.condition = ls.condition;
    k.ridge_applied = ls.ridge_applied;
    out.kernels.push_back(std::move(k));
  }
  return out;
}

std::vector<CategoryBound> category_bounds(std::span<const LagCurve> responses,
                                           std::span<const double> n_effs,
                                           std::span<const std::string> categories,
                                           std::size_t lag) {
  if (responses.size() != n_effs.size() || responses.size() != categories.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "bounds need matching responses and n_eff");
  }
  std::vector<CategoryBound> out;
  for (std::size_t c = 0; c < responses.size(); ++c) {
    if (lag > responses[c].max_lag()) {
      throw Error(ErrorCode::kDimensionMismatch, "bound lag beyond response max lag");
    }
    const double r = responses[c].values[lag];
    out.push_back({categories[c], n_effs[c], bound_lower(r, n_effs[c]), bound_upper(r, n_effs[c])});
  }
  return out;
}

}  // namespace otcimpact
