#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "otcimpact/domain.hpp"
#include "otcimpact/ingest.hpp"

namespace otcimpact {

/// Propagator given by its increments; g(k) = 0 beyond K so G plateaus at
/// sum g.
struct Kernel {
  std::vector<double> g;  // g[k-1] = g(k), k = 1..K

  std::size_t size() const { return g.size(); }
  double plateau() const;
  /// G(lag) = sum_{k <= lag} g(k).
  double at(std::size_t lag) const;

  /// Linear ramp reaching g_inf at lag k: g(1..k) = g_inf / k.
  static Kernel ramp(double g_inf, std::size_t k);
  Kernel scaled(double factor) const;
};

/// Which sign the synthetic trade price sits on.
enum class TradePriceSign {
  kTrue,      // p = m + h eps_true
  kReported,  // p = m + h eps_reported (Bernoulli flips reach the classifier)
  kNoisy,     // p = m + h eps_true + u, u ~ N(0, h / Phi^-1(q))
};

struct SynthConfig {
  std::size_t n_trades = 100'000;
  double phi = 0.5;
  /// Optional second continuation probability; each run uses phi with
  /// probability mix_weight and phi2 otherwise.
  std::optional<double> phi2;
  double mix_weight = 1.0;
  Kernel kernel = Kernel::ramp(5.0, 10);
  /// Propagator of OFF_SEF trades; defaults to kernel.
  std::optional<Kernel> kernel_off;
  double off_fraction = 0.0;
  double noise_sd = 0.0;
  double q = 1.0;
  TradePriceSign price_sign = TradePriceSign::kTrue;
  double half_spread = 0.5;
  double label_fraction = 1.0;
  double notional_mean = 1e7;
  double typical_spread = 100.0;  // bps; quotes carry typical_spread * m / 1e4
  double initial_mid = kRebaseLevel;
  Timestamp start_ts = 1'434'499'200LL * kNanosPerSecond;  // 2015-06-17T00:00Z
  Timestamp trade_interval_ns = 100 * kNanosPerSecond;
  std::string product = "SYNTH";
  std::uint64_t seed = 1;
};

/// Throws INVALID_CONFIG naming the offending field.
void validate(const SynthConfig& config);

struct GroundTruth {
  double phi = 0.0;
  std::optional<double> phi2;
  double mix_weight = 1.0;
  double n_eff = 1.0;  // analytic
  double q = 1.0;
  Kernel kernel;
  Kernel kernel_off;
  double off_fraction = 0.0;
  double noise_sd = 0.0;
  /// Rebasing multiplies synthetic mids by this (1e4 / mean mid); expected
  /// propagators on a rebased tape are kernel values times this factor.
  double rebase_scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t n_trades = 0;
};

/// Analytic C(lag) of the run generator: sum_i pi_i phi_i^lag with pi_i the
/// share of trades in runs of type i.
double analytic_autocorr(double phi, std::optional<double> phi2, double mix_weight,
                         std::size_t lag);
double analytic_n_eff(double phi, std::optional<double> phi2, double mix_weight);

/// Runs of geometric length (continuation probability phi) with i.i.d.
/// uniform signs, so C(l) = phi^l and N_eff = 1 / (1 - phi).
std::vector<Sign> gen_signs(std::size_t n, double phi, std::uint64_t seed);
std::vector<Sign> gen_signs(std::size_t n, double phi, std::optional<double> phi2,
                            double mix_weight, std::mt19937_64& rng);

/// m_0 = initial; m_{t+1} - m_t = sum_{j=0}^{min(t,K-1)} g_{cat(t-j)}(j+1) eps_{t-j} + eta_t.
/// Returns the n mids prevailing before each trade. categories may be empty
/// (all trades use kernels[0]).
std::vector<double> gen_prices(std::span<const Sign> signs, const Kernel& kernel, double noise_sd,
                               std::uint64_t seed, double initial = kRebaseLevel);
std::vector<double> gen_prices(std::span<const Sign> signs, std::span<const Kernel> kernels,
                               std::span<const std::size_t> categories, double noise_sd,
                               double initial, std::mt19937_64& rng);

struct SynthTape {
  Tape tape;
  std::vector<Quote> quotes;
  std::vector<Sign> true_signs;
  std::vector<Sign> reported_signs;
  std::vector<double> mids;    // unrebased, m_t before trade t
  std::vector<double> prices;  // unrebased trade prices
  std::vector<std::size_t> categories;  // 0 = ON_SEF, 1 = OFF_SEF
  GroundTruth truth;
};

struct TradeGenOptions {
  double half_spread = 0.5;
  double q = 1.0;
  TradePriceSign price_sign = TradePriceSign::kTrue;
  double notional_mean = 1e7;
  double label_fraction = 1.0;
};

struct GeneratedTrades {
  std::vector<Sign> reported_signs;
  std::vector<double> prices;
  std::vector<double> notionals;
  std::vector<bool> labeled;
};

/// Trade prices, Bernoulli-flipped reported signs (rate 1 - q), exponential
/// notionals and label flags, drawn in that order per trade.
GeneratedTrades gen_trades(std::span<const Sign> true_signs, std::span<const double> mids,
                           const TradeGenOptions& options, std::mt19937_64& rng);

/// Deterministic for a fixed config: one PRNG stream drives signs,
/// categories, prices and trades in that order.
SynthTape make_dataset(const SynthConfig& config);

enum class SignChannel { kTrue, kReported };

/// Signed trades built straight from the generator, bypassing quotes and the
/// classifier: mid_before is the unrebased mid, eps the chosen channel, and
/// true_sign labels follow the dataset's labeled subset.
std::vector<SignedTrade> signed_trades(const SynthTape& data, SignChannel channel);

}  // namespace otcimpact
