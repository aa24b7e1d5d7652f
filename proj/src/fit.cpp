#include "otcimpact/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace otcimpact {
namespace {

constexpr double kLogBMin = -30.0;
constexpr double kLogBMax = 30.0;
constexpr double kLogNuMin = -8.0;
constexpr double kLogNuMax = 4.0;

// Shape of the stretched exponential with unit amplitude.
double shape(FitForm form, double b, double nu, double lag) {
  const double decay = std::exp(-std::pow(b * lag, nu));
  return form == FitForm::kDecay ? decay : 1.0 - decay;
}

struct Problem {
  FitForm form;
  std::vector<double> lags;
  std::vector<double> values;
  std::vector<double> weights;
  std::size_t evaluations = 0;

  struct Eval {
    double sse;
    double a;
  };

  Eval evaluate(double log_b, double log_nu) {
    ++evaluations;
    const double b = std::exp(std::clamp(log_b, kLogBMin, kLogBMax));
    const double nu = std::exp(std::clamp(log_nu, kLogNuMin, kLogNuMax));
    double sff = 0.0;
    double svf = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double f = shape(form, b, nu, lags[i]);
      sff += weights[i] * f * f;
      svf += weights[i] * values[i] * f;
    }
    const double a = sff > 0.0 ? svf / sff : 0.0;
    double sse = 0.0;
    for (std::size_t i = 0; i < lags.size(); ++i) {
      const double r = values[i] - a * shape(form, b, nu, lags[i]);
      sse += weights[i] * r * r;
    }
    if (!std::isfinite(sse)) sse = std::numeric_limits<double>::infinity();
    return {sse, a};
  }
};

struct Vertex {
  std::array<double, 2> x;
  double f;
};

struct SimplexResult {
  std::array<double, 2> x;
  double f;
  bool converged;
};

SimplexResult nelder_mead(Problem& problem, std::array<double, 2> start, double step,
                          std::size_t budget, double tol) {
  auto f = [&](const std::array<double, 2>& x) { return problem.evaluate(x[0], x[1]).sse; };
  std::array<Vertex, 3> s{Vertex{start, f(start)},
                          Vertex{{start[0] + step, start[1]}, 0.0},
                          Vertex{{start[0], start[1] + step}, 0.0}};
  s[1].f = f(s[1].x);
  s[2].f = f(s[2].x);
  std::size_t used = 3;

  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  while (true) {
    std::stable_sort(s.begin(), s.end(), by_value);
    double diameter = 0.0;
    for (std::size_t i = 1; i < 3; ++i) {
      for (std::size_t d = 0; d < 2; ++d) {
        diameter = std::max(diameter, std::abs(s[i].x[d] - s[0].x[d]));
      }
    }
    const double scale = 1.0 + std::max(std::abs(s[0].x[0]), std::abs(s[0].x[1]));
    if (diameter < tol * scale) return {s[0].x, s[0].f, true};
    if (used >= budget) return {s[0].x, s[0].f, false};

    std::array<double, 2> centroid{(s[0].x[0] + s[1].x[0]) / 2.0, (s[0].x[1] + s[1].x[1]) / 2.0};
    auto along = [&](double t) {
      return std::array<double, 2>{centroid[0] + t * (s[2].x[0] - centroid[0]),
                                   centroid[1] + t * (s[2].x[1] - centroid[1])};
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    ++used;
    if (fr < s[0].f) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      ++used;
      s[2] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < s[1].f) {
      s[2] = {xr, fr};
      continue;
    }
    const bool outside = fr < s[2].f;
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    ++used;
    if (fc < (outside ? fr : s[2].f)) {
      s[2] = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i < 3; ++i) {
      for (std::size_t d = 0; d < 2; ++d) s[i].x[d] = s[0].x[d] + 0.5 * (s[i].x[d] - s[0].x[d]);
      s[i].f = f(s[i].x);
      ++used;
    }
  }
}

}  // namespace

FitParams fit_stretched(const LagCurve& curve, FitForm form, const FitOptions& options) {
  const std::size_t lag_max = std::min(options.lag_max.value_or(curve.max_lag()), curve.max_lag());
  Problem problem{form, {}, {}, {}};
  for (std::size_t lag = options.lag_min; lag <= lag_max && lag < curve.values.size(); ++lag) {
    problem.lags.push_back(static_cast<double>(lag));
    problem.values.push_back(curve.values[lag]);
    double w = 1.0;
    if (options.count_weighted) {
      w = lag < curve.counts.size() ? static_cast<double>(curve.counts[lag]) : 0.0;
    }
    problem.weights.push_back(w);
  }
  if (problem.lags.size() < 8) {
    throw Error(ErrorCode::kTooFewPoints,
                "need at least 8 lags, have " + std::to_string(problem.lags.size()));
  }
  if (options.n_starts == 0) throw Error(ErrorCode::kInvalidConfig, "n_starts must be > 0");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> log_b_start(std::log(1e-3), std::log(10.0));
  std::uniform_real_distribution<double> log_nu_start(std::log(0.25), std::log(3.0));
  const std::size_t budget = std::max<std::size_t>(options.max_evaluations / options.n_starts, 16);

  std::optional<SimplexResult> best;
  for (std::size_t k = 0; k < options.n_starts; ++k) {
    const std::array<double, 2> start{log_b_start(rng), log_nu_start(rng)};
    const auto res = nelder_mead(problem, start, 0.5, budget, options.tolerance);
    if (!res.converged) continue;
    if (!best || res.f < best->f) best = res;
  }
  if (!best) {
    throw Error(ErrorCode::kNonConverged, "no simplex start converged within " +
                                              std::to_string(options.max_evaluations) +
                                              " evaluations");
  }

  const double log_b = std::clamp(best->x[0], kLogBMin, kLogBMax);
  const double log_nu = std::clamp(best->x[1], kLogNuMin, kLogNuMax);
  const auto final_eval = problem.evaluate(log_b, log_nu);
  FitParams p;
  p.form = form;
  p.a = final_eval.a;
  p.b = std::exp(log_b);
  p.nu = std::exp(log_nu);
  p.sse = final_eval.sse;
  p.lag_min = options.lag_min;
  p.lag_max = lag_max;
  p.evaluations = problem.evaluations;
  p.degenerate = std::pow(p.b * problem.lags.front(), p.nu) > 30.0;
  return p;
}

double eval_fit(const FitParams& params, double lag) {
  return params.a * shape(params.form, params.b, params.nu, lag);
}

LagCurve fitted_curve(const FitParams& params, CurveKind kind, std::size_t max_lag,
                      bool pin_origin) {
  LagCurve c(kind, max_lag);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    c.values[lag] = eval_fit(params, static_cast<double>(lag));
  }
  if (pin_origin) c.values[0] = 1.0;
  return c;
}

}  // namespace otcimpact
