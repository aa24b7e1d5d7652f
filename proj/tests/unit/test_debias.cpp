#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "otcimpact/debias.hpp"
#include "otcimpact/estimators.hpp"
#include "otcimpact/signing.hpp"
#include "otcimpact/synth.hpp"
#include "support/oracles.hpp"

using namespace otcimpact;

namespace {

SynthTape flipped_tape(double q, std::size_t n, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.n_trades = n;
  cfg.phi = 0.8;
  cfg.q = q;
  cfg.price_sign = TradePriceSign::kReported;
  cfg.noise_sd = 1.0;
  cfg.initial_mid = 1e6;  // persistent flow wanders far on long tapes
  cfg.seed = seed;
  return make_dataset(cfg);
}

template <class F>
std::vector<std::vector<double>> per_block(std::span<const SignedTrade> trades, std::size_t blocks,
                                           F&& stat) {
  std::vector<std::vector<double>> out;
  const std::size_t len = trades.size() / blocks;
  for (std::size_t b = 0; b < blocks; ++b) out.push_back(stat(trades.subspan(b * len, len)));
  return out;
}

double sigma_at(const std::vector<std::vector<double>>& blocks, std::size_t lag) {
  std::vector<double> v;
  for (const auto& b : blocks) v.push_back(b[lag]);
  return oracle::batch_sigma(v);
}

// Per-lag threshold for checks over ~20 lags at once: Bonferroni at a
// family-wise 3 sigma level.
constexpr double kLagSigmas = 4.0;

}  // namespace

TEST(Debias, PerfectClassifierIsIdentity) {
  const auto data = flipped_tape(1.0, 5'000, 3);
  const auto trades = signed_trades(data, SignChannel::kReported);
  const auto c = c_true(trades, 1.0, 20);
  const auto naive = autocorr(signs_of(trades), 20);
  for (std::size_t l = 0; l <= 20; ++l) EXPECT_DOUBLE_EQ(c.values[l], naive.values[l]);
  const auto r = response(trades, 20);
  EXPECT_EQ(r_true(r, 1.0).values, r.values);

  const auto plain = solve_propagator(naive, r, 10);
  const auto corrected = g_true(c, r_true(r, 1.0), false, 10);
  for (std::size_t l = 0; l <= 20; ++l) EXPECT_DOUBLE_EQ(corrected.solution.G.values[l], plain.G.values[l]);
  EXPECT_FALSE(corrected.c_fit.has_value());
}

TEST(Debias, QTooLow) {
  LagCurve r(CurveKind::kResponse, 3);
  for (double q : {0.5, 0.3, 0.0, 1.2}) {
    try {
      r_true(r, q);
      FAIL() << q;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kQTooLow);
    }
  }
}

TEST(Debias, NoLabels) {
  auto trades = signed_trades(flipped_tape(0.9, 200, 1), SignChannel::kReported);
  for (auto& t : trades) t.trade.true_sign.reset();
  try {
    c_true(trades, 0.9, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoLabels);
  }
}

TEST(Debias, ResponseScaling) {
  LagCurve r(CurveKind::kResponse, 4);
  r.values = {0.0, 3.0, 10.0, -2.0, 7.0};
  const auto t = r_true(r, 0.72);
  EXPECT_NEAR(t.values[2], 22.727272727272727, 1e-12);
  EXPECT_NEAR(10.0 / 0.44, 22.73, 0.005);
  for (std::size_t l = 0; l < r.values.size(); ++l) {
    EXPECT_EQ(std::signbit(t.values[l]), std::signbit(r.values[l]));
  }
  EXPECT_EQ(std::max_element(t.values.begin(), t.values.end()) - t.values.begin(),
            std::max_element(r.values.begin(), r.values.end()) - r.values.begin());
}

TEST(Debias, CorrectedAutocorrRecoversTruth) {
  const std::size_t n = 200'000, L = 20;
  const auto data = flipped_tape(0.72, n, 11);
  const auto trades = signed_trades(data, SignChannel::kReported);
  const auto q_hat = label_accuracy(trades).q_hat;
  EXPECT_NEAR(q_hat, 0.72, 3.0 * std::sqrt(0.72 * 0.28 / n));
  const auto c = c_true(trades, 0.72, L);
  const auto blocks = per_block(std::span<const SignedTrade>(trades), 20, [&](auto part) {
    return c_true(part, 0.72, L).values;
  });
  for (std::size_t l = 1; l <= L; ++l) {
    EXPECT_NEAR(c.values[l], std::pow(0.8, static_cast<double>(l)), kLagSigmas * sigma_at(blocks, l)) << l;
  }
}

TEST(Debias, NaiveAutocorrShrinksBySquare) {
  const std::size_t n = 200'000, L = 20;
  const auto data = flipped_tape(0.72, n, 12);
  const auto trades = signed_trades(data, SignChannel::kReported);
  const auto naive = autocorr(signs_of(trades), L);
  const auto blocks = per_block(std::span<const SignedTrade>(trades), 20, [&](auto part) {
    return autocorr(signs_of(part), L).values;
  });
  for (std::size_t l = 1; l <= L; ++l) {
    const double want = 0.44 * 0.44 * std::pow(0.8, static_cast<double>(l));
    EXPECT_NEAR(naive.values[l], want, kLagSigmas * sigma_at(blocks, l)) << l;
  }
}

TEST(Debias, FitFirstPinsOrigin) {
  const std::size_t L = 40;
  LagCurve c(CurveKind::kAutocorr, L), r(CurveKind::kResponse, L);
  for (std::size_t l = 0; l <= L; ++l) {
    c.values[l] = l == 0 ? 1.0 : 0.6 * std::exp(-std::pow(0.2 * l, 0.7));
    r.values[l] = 8.0 * (1.0 - std::exp(-std::pow(0.1 * l, 0.9)));
  }
  const auto sol = g_true(c, r, true, 20);
  ASSERT_TRUE(sol.c_fit && sol.r_fit);
  EXPECT_EQ(sol.c_used.values[0], 1.0);
  EXPECT_EQ(sol.r_used.values[0], 0.0);
  EXPECT_NEAR(sol.c_fit->a, 0.6, 1e-4);
  EXPECT_NEAR(sol.r_fit->a, 8.0, 1e-3);
  for (double v : sol.solution.G.values) EXPECT_TRUE(std::isfinite(v));
}
