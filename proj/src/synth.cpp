#include "otcimpact/synth.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace otcimpact {
namespace {

[[noreturn]] void bad_config(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, field + ": " + why, field);
}

// Share of trades living in runs of each type, and the per-type phi.
struct RunMixture {
  double phi[2];
  double share[2];
  int types;
};

RunMixture mixture(double phi, std::optional<double> phi2, double mix_weight) {
  if (!phi2) return {{phi, 0.0}, {1.0, 0.0}, 1};
  const double w1 = mix_weight / (1.0 - phi);
  const double w2 = (1.0 - mix_weight) / (1.0 - *phi2);
  return {{phi, *phi2}, {w1 / (w1 + w2), w2 / (w1 + w2)}, 2};
}

}  // namespace

double Kernel::plateau() const { return std::accumulate(g.begin(), g.end(), 0.0); }

double Kernel::at(std::size_t lag) const {
  double sum = 0.0;
  for (std::size_t k = 1; k <= lag && k <= g.size(); ++k) sum += g[k - 1];
  return sum;
}

Kernel Kernel::ramp(double g_inf, std::size_t k) {
  if (k == 0) bad_config("kernel.k", "must be >= 1");
  return Kernel{std::vector<double>(k, g_inf / static_cast<double>(k))};
}

Kernel Kernel::scaled(double factor) const {
  Kernel out = *this;
  for (auto& v : out.g) v *= factor;
  return out;
}

void validate(const SynthConfig& c) {
  if (c.n_trades < 2) bad_config("n_trades", "must be >= 2");
  if (!(c.phi >= 0.0 && c.phi < 1.0)) bad_config("phi", "must lie in [0, 1)");
  if (c.phi2 && !(*c.phi2 >= 0.0 && *c.phi2 < 1.0)) bad_config("phi2", "must lie in [0, 1)");
  if (!(c.mix_weight >= 0.0 && c.mix_weight <= 1.0)) bad_config("mix_weight", "must lie in [0, 1]");
  if (!(c.q > 0.5 && c.q <= 1.0)) bad_config("q", "must lie in (0.5, 1]");
  if (!(c.noise_sd >= 0.0)) bad_config("noise_sd", "must be >= 0");
  if (!(c.half_spread >= 0.0)) bad_config("half_spread", "must be >= 0");
  if (c.price_sign == TradePriceSign::kNoisy && c.q < 1.0 && !(c.half_spread > 0.0)) {
    bad_config("half_spread", "noisy trade prices need half_spread > 0");
  }
  if (!(c.label_fraction >= 0.0 && c.label_fraction <= 1.0)) {
    bad_config("label_fraction", "must lie in [0, 1]");
  }
  if (!(c.off_fraction >= 0.0 && c.off_fraction <= 1.0)) {
    bad_config("off_fraction", "must lie in [0, 1]");
  }
  if (!(c.notional_mean > 0.0)) bad_config("notional_mean", "must be > 0");
  if (!(c.typical_spread > 0.0)) bad_config("typical_spread", "must be > 0");
  if (c.trade_interval_ns < 2) bad_config("trade_interval_ns", "must be >= 2");
  if (c.kernel.g.empty()) bad_config("kernel", "needs at least one increment");
  for (double v : c.kernel.g) {
    if (!std::isfinite(v)) bad_config("kernel", "increments must be finite");
  }
  if (c.kernel_off) {
    for (double v : c.kernel_off->g) {
      if (!std::isfinite(v)) bad_config("kernel_off", "increments must be finite");
    }
  }
}

double analytic_autocorr(double phi, std::optional<double> phi2, double mix_weight,
                         std::size_t lag) {
  const auto mix = mixture(phi, phi2, mix_weight);
  double c = 0.0;
  for (int i = 0; i < mix.types; ++i) {
    c += mix.share[i] * std::pow(mix.phi[i], static_cast<double>(lag));
  }
  return c;
}

double analytic_n_eff(double phi, std::optional<double> phi2, double mix_weight) {
  const auto mix = mixture(phi, phi2, mix_weight);
  double n = 0.0;
  for (int i = 0; i < mix.types; ++i) n += mix.share[i] / (1.0 - mix.phi[i]);
  return n;
}

std::vector<Sign> gen_signs(std::size_t n, double phi, std::optional<double> phi2,
                            double mix_weight, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution pick_first(mix_weight);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Sign> out;
  out.reserve(n);
  Sign sign = 1;
  double run_phi = phi;
  bool continues = false;
  for (std::size_t t = 0; t < n; ++t) {
    if (!continues) {
      sign = coin(rng) ? Sign{1} : Sign{-1};
      run_phi = (phi2 && !pick_first(rng)) ? *phi2 : phi;
    }
    out.push_back(sign);
    continues = unif(rng) < run_phi;
  }
  return out;
}

std::vector<Sign> gen_signs(std::size_t n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gen_signs(n, phi, std::nullopt, 1.0, rng);
}

std::vector<double> gen_prices(std::span<const Sign> signs, std::span<const Kernel> kernels,
                               std::span<const std::size_t> categories, double noise_sd,
                               double initial, std::mt19937_64& rng) {
  if (kernels.empty()) bad_config("kernel", "missing");
  if (!categories.empty() && categories.size() != signs.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "categories must match signs");
  }
  std::size_t depth = 0;
  for (const auto& k : kernels) depth = std::max(depth, k.size());
  std::normal_distribution<double> eta(0.0, noise_sd > 0.0 ? noise_sd : 1.0);

  const std::size_t n = signs.size();
  std::vector<double> mids(n);
  double m = initial;
  for (std::size_t t = 0; t < n; ++t) {
    mids[t] = m;
    double step = 0.0;
    for (std::size_t j = 0; j < depth && j <= t; ++j) {
      const std::size_t src = t - j;
      const Kernel& k = kernels[categories.empty() ? 0 : categories[src]];
      if (j < k.size()) step += k.g[j] * static_cast<double>(signs[src]);
    }
    if (noise_sd > 0.0) step += eta(rng);
    m += step;
  }
  return mids;
}

std::vector<double> gen_prices(std::span<const Sign> signs, const Kernel& kernel, double noise_sd,
                               std::uint64_t seed, double initial) {
  std::mt19937_64 rng(seed);
  const Kernel kernels[] = {kernel};
  return gen_prices(signs, kernels, {}, noise_sd, initial, rng);
}

GeneratedTrades gen_trades(std::span<const Sign> true_signs, std::span<const double> mids,
                           const TradeGenOptions& options, std::mt19937_64& rng) {
  if (true_signs.size() != mids.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "signs and mids differ in length");
  }
  double noise = 0.0;
  if (options.price_sign == TradePriceSign::kNoisy && options.q < 1.0) {
    // P(h + u > 0) = q for u ~ N(0, sigma).
    const boost::math::normal_distribution<double> std_normal;
    noise = options.half_spread / boost::math::quantile(std_normal, options.q);
  }
  std::bernoulli_distribution flip(1.0 - options.q);
  std::exponential_distribution<double> size(1.0 / options.notional_mean);
  std::bernoulli_distribution label(options.label_fraction);
  std::normal_distribution<double> price_noise(0.0, noise > 0.0 ? noise : 1.0);

  GeneratedTrades out;
  const std::size_t n = true_signs.size();
  out.reported_signs.resize(n);
  out.prices.resize(n);
  out.notionals.resize(n);
  out.labeled.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Sign truth = true_signs[t];
    const Sign reported = flip(rng) ? static_cast<Sign>(-truth) : truth;
    out.reported_signs[t] = reported;
    double p = mids[t];
    switch (options.price_sign) {
      case TradePriceSign::kTrue: p += options.half_spread * truth; break;
      case TradePriceSign::kReported: p += options.half_spread * reported; break;
      case TradePriceSign::kNoisy:
        p += options.half_spread * truth;
        if (noise > 0.0) p += price_noise(rng);
        break;
    }
    out.prices[t] = p;
    double q = 0.0;
    while (!(q > 0.0)) q = size(rng);
    out.notionals[t] = q;
    out.labeled[t] = label(rng);
  }
  return out;
}

SynthTape make_dataset(const SynthConfig& config) {
  validate(config);
  std::mt19937_64 rng(config.seed);
  const std::size_t n = config.n_trades;

  SynthTape data;
  data.true_signs = gen_signs(n, config.phi, config.phi2, config.mix_weight, rng);

  data.categories.assign(n, 0);
  if (config.off_fraction > 0.0) {
    std::bernoulli_distribution off(config.off_fraction);
    for (auto& c : data.categories) c = off(rng) ? 1 : 0;
  }
  const Kernel kernels[] = {config.kernel, config.kernel_off.value_or(config.kernel)};
  data.mids = gen_prices(data.true_signs, kernels, data.categories, config.noise_sd,
                         config.initial_mid, rng);

  TradeGenOptions trade_opts;
  trade_opts.half_spread = config.half_spread;
  trade_opts.q = config.q;
  trade_opts.price_sign = config.price_sign;
  trade_opts.notional_mean = config.notional_mean;
  trade_opts.label_fraction = config.label_fraction;
  auto gen = gen_trades(data.true_signs, data.mids, trade_opts, rng);
  data.reported_signs = std::move(gen.reported_signs);
  data.prices = std::move(gen.prices);

  const double to_spread = config.typical_spread / kRebaseLevel;
  std::vector<Trade> trades;
  trades.reserve(n);
  data.quotes.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Timestamp ts = config.start_ts + static_cast<Timestamp>(t + 1) * config.trade_interval_ns;
    Quote q{ts - config.trade_interval_ns / 2, config.product, data.mids[t] * to_spread};
    Trade tr;
    tr.id = t;
    tr.ts = ts;
    tr.product = config.product;
    tr.spread = data.prices[t] * to_spread;
    tr.notional = gen.notionals[t];
    tr.venue = data.categories[t] == 1 ? Venue::kOffSef : Venue::kOnSef;
    if (gen.labeled[t]) tr.true_sign = data.true_signs[t];
    if (validate(q) || validate(tr)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "synthetic mid path reached a non-positive level at trade " + std::to_string(t) +
                      "; raise initial_mid or shorten the tape",
                  "initial_mid");
    }
    data.quotes.push_back(std::move(q));
    trades.push_back(std::move(tr));
  }
  data.tape = make_tape(std::move(trades), data.quotes);

  auto& truth = data.truth;
  truth.phi = config.phi;
  truth.phi2 = config.phi2;
  truth.mix_weight = config.mix_weight;
  truth.n_eff = analytic_n_eff(config.phi, config.phi2, config.mix_weight);
  truth.q = config.q;
  truth.kernel = config.kernel;
  truth.kernel_off = kernels[1];
  truth.off_fraction = config.off_fraction;
  truth.noise_sd = config.noise_sd;
  truth.rebase_scale = kRebaseLevel / (data.tape.rebased.mean_spread / to_spread);
  truth.seed = config.seed;
  truth.n_trades = n;
  return data;
}

std::vector<SignedTrade> signed_trades(const SynthTape& data, SignChannel channel) {
  const auto& signs = channel == SignChannel::kTrue ? data.true_signs : data.reported_signs;
  std::vector<SignedTrade> out;
  out.reserve(data.tape.trades.size());
  for (std::size_t t = 0; t < data.tape.trades.size(); ++t) {
    out.push_back({data.tape.trades[t], data.mids[t], signs[t], false});
  }
  return out;
}

}  // namespace otcimpact
