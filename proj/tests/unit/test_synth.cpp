#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "otcimpact/estimators.hpp"
#include "otcimpact/io.hpp"
#include "otcimpact/signing.hpp"
#include "otcimpact/synth.hpp"
#include "support/oracles.hpp"

using namespace otcimpact;

namespace {

std::vector<double> block_n_eff(std::span<const Sign> eps, std::size_t blocks, std::size_t l_sum) {
  std::vector<double> out;
  const std::size_t len = eps.size() / blocks;
  for (std::size_t b = 0; b < blocks; ++b) {
    out.push_back(n_eff(autocorr(eps.subspan(b * len, len), l_sum), l_sum));
  }
  return out;
}

double truncated_geometric(double phi, std::size_t L) {
  return (1.0 - std::pow(phi, static_cast<double>(L + 1))) / (1.0 - phi);
}

}  // namespace

TEST(GenSigns, IidWhenPhiZero) {
  const std::size_t n = 100'000;
  const auto eps = gen_signs(n, 0.0, 1);
  const auto c = autocorr(eps, 20);
  for (std::size_t l = 1; l <= 20; ++l) EXPECT_LT(std::abs(c.values[l]), 3.0 / std::sqrt(n)) << l;
}

TEST(GenSigns, ConcentrationBound) {
  const std::size_t n = 100'000;
  const double phi = 0.5;
  const auto c = autocorr(gen_signs(n, phi, 1), 20);
  for (std::size_t l = 1; l <= 20; ++l) {
    const double want = std::pow(phi, static_cast<double>(l));
    const double bound = 3.0 * std::sqrt((1.0 - std::pow(phi, 2.0 * l)) / n);
    EXPECT_LE(std::abs(c.values[l] - want), bound) << l;
  }
}

TEST(GenSigns, NEffAtHalf) {
  const auto eps = gen_signs(100'000, 0.5, 2);
  const double got = n_eff(autocorr(eps, 100), 100);
  const double sigma = oracle::batch_sigma(block_n_eff(eps, 20, 100));
  EXPECT_NEAR(got, truncated_geometric(0.5, 100), 3.0 * sigma);
  EXPECT_NEAR(got, 2.0, 3.0 * sigma);
}

TEST(GenSigns, PersistentFlow) {
  const double phi = 0.93;
  const auto eps = gen_signs(1'000'000, phi, 3);
  const double got = n_eff(autocorr(eps, 100), 100);
  const double sigma = oracle::batch_sigma(block_n_eff(eps, 20, 100));
  EXPECT_NEAR(got, truncated_geometric(phi, 100), 3.0 * sigma);
  EXPECT_NEAR(got, 14.2, 0.05 * 14.2);
  EXPECT_NEAR(analytic_n_eff(phi, std::nullopt, 1.0), 1.0 / 0.07, 1e-12);
}

TEST(GenSigns, MixtureMatchesAnalyticCurve) {
  std::mt19937_64 rng(4);
  const auto eps = gen_signs(400'000, 0.3, 0.9, 0.7, rng);
  const auto c = autocorr(eps, 15);
  for (std::size_t l = 1; l <= 15; ++l) {
    EXPECT_NEAR(c.values[l], analytic_autocorr(0.3, 0.9, 0.7, l), 0.02) << l;
  }
  // Shares weight run types by their mean length.
  const double w1 = 0.7 / 0.7, w2 = 0.3 / 0.1;
  const double pi1 = w1 / (w1 + w2);
  EXPECT_NEAR(analytic_n_eff(0.3, 0.9, 0.7), pi1 / 0.7 + (1 - pi1) / 0.1, 1e-12);
  EXPECT_NEAR(analytic_autocorr(0.3, 0.9, 0.7, 0), 1.0, 1e-15);
}

TEST(GenPrices, ImpulseReadsOutKernel) {
  std::vector<Sign> s(40, 0);
  s[0] = 1;
  const auto k = Kernel::ramp(5.0, 10);
  const auto m = gen_prices(s, k, 0.0, 1);
  for (std::size_t l = 0; l < s.size(); ++l) EXPECT_EQ(m[l] - m[0], k.at(l)) << l;

  const Kernel odd{{0.3, 0.7, 0.1, 0.05}};
  const auto m2 = gen_prices(s, odd, 0.0, 1);
  for (std::size_t l = 0; l < s.size(); ++l) EXPECT_NEAR(m2[l] - m2[0], odd.at(l), 1e-11);
  EXPECT_NEAR(odd.plateau(), 1.15, 1e-15);
}

TEST(GenPrices, ConstantFlowDrifts) {
  std::vector<Sign> s(50, 1);
  const Kernel k{{0.4, 0.3, 0.2, 0.1}};
  const auto m = gen_prices(s, k, 0.0, 1);
  for (std::size_t t = 4; t + 1 < s.size(); ++t) EXPECT_NEAR(m[t + 1] - m[t], 1.0, 1e-9);
  EXPECT_NEAR(m[1] - m[0], 0.4, 1e-12);
}

TEST(GenPrices, ConvolutionMatchesDoubleLoop) {
  const auto s = gen_signs(1'000, 0.6, 5);
  const Kernel k{{0.9, -0.2, 0.35, 0.1, 0.05, 0.3}};
  const auto m = gen_prices(s, k, 0.0, 1);
  for (std::size_t t = 0; t < s.size(); ++t) {
    double want = kRebaseLevel;
    for (std::size_t u = 0; u < t; ++u) {
      for (std::size_t j = 0; j < k.size() && j <= u; ++j) want += k.g[j] * s[u - j];
    }
    ASSERT_NEAR(m[t], want, 1e-9) << t;
  }
}

TEST(GenTrades, ReportedChannel) {
  const auto s = gen_signs(100'000, 0.5, 6);
  const auto m = gen_prices(s, Kernel::ramp(5.0, 10), 0.0, 6);
  std::mt19937_64 rng(6);
  TradeGenOptions opt;
  const auto exact = gen_trades(s, m, opt, rng);
  EXPECT_EQ(exact.reported_signs, s);
  opt.q = 0.72;
  const auto noisy = gen_trades(s, m, opt, rng);
  std::size_t agree = 0;
  for (std::size_t t = 0; t < s.size(); ++t) agree += noisy.reported_signs[t] == s[t];
  const double q_hat = static_cast<double>(agree) / s.size();
  EXPECT_NEAR(q_hat, 0.72, 3.0 * std::sqrt(0.72 * 0.28 / s.size()));
  double mean_q = 0.0;
  for (double q : noisy.notionals) {
    EXPECT_GT(q, 0.0);
    mean_q += q;
  }
  EXPECT_NEAR(mean_q / s.size(), opt.notional_mean, 3.0 * opt.notional_mean / std::sqrt(s.size()));
  for (std::size_t t = 0; t < s.size(); ++t) ASSERT_EQ(noisy.prices[t], m[t] + 0.5 * s[t]);
}

TEST(GenTrades, NoisyPricesMisclassifyAtRateOneMinusQ) {
  const auto s = gen_signs(100'000, 0.5, 7);
  const auto m = gen_prices(s, Kernel::ramp(5.0, 10), 0.0, 7);
  std::mt19937_64 rng(7);
  TradeGenOptions opt;
  opt.q = 0.8;
  opt.price_sign = TradePriceSign::kNoisy;
  const auto g = gen_trades(s, m, opt, rng);
  std::size_t agree = 0;
  for (std::size_t t = 0; t < s.size(); ++t) agree += (g.prices[t] > m[t] ? 1 : -1) == s[t];
  EXPECT_NEAR(static_cast<double>(agree) / s.size(), 0.8, 3.0 * std::sqrt(0.16 / s.size()));
}

TEST(MakeDataset, Deterministic) {
  SynthConfig cfg;
  cfg.n_trades = 5'000;
  cfg.noise_sd = 1.0;
  cfg.q = 0.8;
  cfg.off_fraction = 0.3;
  cfg.seed = 99;
  const auto a = make_dataset(cfg);
  const auto b = make_dataset(cfg);
  std::ostringstream ta, tb, qa, qb;
  write_trades_csv(ta, a.tape.trades);
  write_trades_csv(tb, b.tape.trades);
  write_quotes_csv(qa, a.quotes);
  write_quotes_csv(qb, b.quotes);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(qa.str(), qb.str());
  EXPECT_EQ(a.reported_signs, b.reported_signs);
  cfg.seed = 100;
  EXPECT_NE(make_dataset(cfg).true_signs, a.true_signs);
}

TEST(MakeDataset, ClassifierRecoversTrueSigns) {
  SynthConfig cfg;
  cfg.n_trades = 20'000;
  cfg.noise_sd = 2.0;
  const auto data = make_dataset(cfg);
  const auto signed_tape = classify_all(data.tape);
  ASSERT_EQ(signed_tape.trades.size(), cfg.n_trades);
  for (std::size_t t = 0; t < cfg.n_trades; ++t) ASSERT_EQ(signed_tape.trades[t].eps, data.true_signs[t]);
  EXPECT_EQ(label_accuracy(signed_tape.trades).q_hat, 1.0);
}

TEST(MakeDataset, TableRowNEff) {
  SynthConfig cfg;
  cfg.n_trades = 1'000'000;
  cfg.phi = 1.0 - 1.0 / 2.3;
  cfg.initial_mid = 1e6;
  const auto data = make_dataset(cfg);
  EXPECT_NEAR(data.truth.n_eff, 2.3, 1e-12);
  const auto signed_tape = classify_all(data.tape);
  const double got = n_eff(autocorr(signs_of(signed_tape.trades), 100), 100);
  EXPECT_NEAR(got, 2.3, 0.05 * 2.3);
}

TEST(MakeDataset, RecordsCategories) {
  SynthConfig cfg;
  cfg.n_trades = 50'000;
  cfg.off_fraction = 0.25;
  cfg.kernel_off = cfg.kernel.scaled(0.5);
  const auto data = make_dataset(cfg);
  std::size_t off = 0;
  for (std::size_t t = 0; t < cfg.n_trades; ++t) {
    off += data.categories[t];
    ASSERT_EQ(data.tape.trades[t].venue, data.categories[t] ? Venue::kOffSef : Venue::kOnSef);
  }
  EXPECT_NEAR(off / 5e4, 0.25, 3.0 * std::sqrt(0.25 * 0.75 / 5e4));
  EXPECT_DOUBLE_EQ(data.truth.kernel_off.plateau(), 2.5);
}

TEST(MakeDataset, LabelFractionAndTimestamps) {
  SynthConfig cfg;
  cfg.n_trades = 10'000;
  cfg.label_fraction = 0.3;
  const auto data = make_dataset(cfg);
  std::size_t labeled = 0;
  for (const auto& t : data.tape.trades) labeled += t.true_sign.has_value();
  EXPECT_NEAR(labeled / 1e4, 0.3, 3.0 * std::sqrt(0.21 / 1e4));
  EXPECT_EQ(data.tape.trades[0].ts, cfg.start_ts + cfg.trade_interval_ns);
  EXPECT_EQ(data.quotes[0].ts, cfg.start_ts + cfg.trade_interval_ns / 2);
  double mean_mid = 0.0;
  for (double m : data.mids) mean_mid += m;
  mean_mid /= data.mids.size();
  EXPECT_NEAR(data.truth.rebase_scale, kRebaseLevel / mean_mid, 1e-9);
}

TEST(MakeDataset, InvalidConfig) {
  auto bad = [](auto mutate, const char* field) {
    SynthConfig cfg;
    cfg.n_trades = 100;
    mutate(cfg);
    try {
      make_dataset(cfg);
      ADD_FAILURE() << field;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
      EXPECT_EQ(e.field(), field);
    }
  };
  bad([](SynthConfig& c) { c.phi = 1.0; }, "phi");
  bad([](SynthConfig& c) { c.q = 0.5; }, "q");
  bad([](SynthConfig& c) { c.n_trades = 1; }, "n_trades");
  bad([](SynthConfig& c) { c.noise_sd = -1.0; }, "noise_sd");
  bad([](SynthConfig& c) { c.off_fraction = 1.5; }, "off_fraction");
  bad([](SynthConfig& c) { c.kernel.g.clear(); }, "kernel");
  bad([](SynthConfig& c) { c.initial_mid = 1.0; c.noise_sd = 50.0; }, "initial_mid");
}
