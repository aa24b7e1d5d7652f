#include "otcimpact/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "otcimpact/category.hpp"
#include "otcimpact/debias.hpp"
#include "otcimpact/estimators.hpp"
#include "otcimpact/fit.hpp"
#include "otcimpact/ingest.hpp"
#include "otcimpact/io.hpp"
#include "otcimpact/multiprop.hpp"
#include "otcimpact/propagator.hpp"
#include "otcimpact/signing.hpp"
#include "otcimpact/synth.hpp"

namespace otcimpact {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, field + ": " + why, field);
}

json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round_real(x);
}

json real(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

json reals(std::span<const double> xs) {
  json arr = json::array();
  for (double x : xs) arr.push_back(real(x));
  return arr;
}

// ---- config reading -------------------------------------------------------

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) config_error(where, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) config_error(where.empty() ? key : where + "." + key, "unknown key");
  }
}

void read(const json& j, const char* key, double& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  if (!it->is_number()) config_error(key, "expected a number");
  dst = it->get<double>();
}

void read(const json& j, const char* key, std::optional<double>& dst) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    dst.reset();
    return;
  }
  if (!it->is_number()) config_error(key, "expected a number");
  dst = it->get<double>();
}

void read(const json& j, const char* key, std::uint64_t& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  if (!it->is_number_unsigned()) config_error(key, "expected a non-negative integer");
  dst = it->get<std::uint64_t>();
}

void read(const json& j, const char* key, std::int64_t& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  if (!it->is_number_integer()) config_error(key, "expected an integer");
  dst = it->get<std::int64_t>();
}

void read(const json& j, const char* key, std::optional<std::size_t>& dst) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (it->is_null()) {
    dst.reset();
    return;
  }
  std::size_t v = 0;
  read(j, key, v);
  dst = v;
}

void read(const json& j, const char* key, bool& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  if (!it->is_boolean()) config_error(key, "expected true or false");
  dst = it->get<bool>();
}

void read(const json& j, const char* key, std::string& dst) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  if (!it->is_string()) config_error(key, "expected a string");
  dst = it->get<std::string>();
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path, "config");
  try {
    json j = json::parse(in);
    if (!j.is_object()) config_error("config", "top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    config_error("config", std::string("invalid JSON: ") + e.what());
  }
}

std::string config_hash(const json& effective) { return hex64(fnv1a64(effective.dump())); }

// ---- analysis configuration ----------------------------------------------

struct AnalysisConfig {
  std::size_t max_lag = 60;
  std::size_t K = 30;
  std::size_t lag_star = 30;
  std::size_t l_sum = 100;
  std::string tie_rule = "previous";
  std::optional<double> max_staleness_s;
  bool split_sessions = false;
  std::string window = "month";
  double window_days = 30.0;
  double bin_width_s = 900.0;
  std::size_t n_groups = 30;
  double clip = 3.0;
  std::size_t fit_lag_min = 1;
  std::optional<std::size_t> fit_lag_max;
  bool fit_count_weighted = false;
  std::uint64_t fit_seed = 20160831;
  bool fit_first = true;
  std::optional<double> q_hat;

  std::size_t stat_lag() const { return std::max({max_lag, l_sum, lag_star}); }
};

const std::set<std::string> kAnalysisKeys = {
    "max_lag",     "K",        "lag_star",   "l_sum",       "tie_rule",
    "max_staleness_s", "split_sessions", "window", "window_days", "bin_width_s",
    "n_groups",    "clip",     "fit_lag_min", "fit_lag_max", "fit_count_weighted",
    "fit_seed",    "fit_first", "q_hat"};

AnalysisConfig parse_analysis(const json& j) {
  check_keys(j, kAnalysisKeys, "");
  AnalysisConfig c;
  read(j, "max_lag", c.max_lag);
  read(j, "K", c.K);
  read(j, "lag_star", c.lag_star);
  read(j, "l_sum", c.l_sum);
  read(j, "tie_rule", c.tie_rule);
  read(j, "max_staleness_s", c.max_staleness_s);
  read(j, "split_sessions", c.split_sessions);
  read(j, "window", c.window);
  read(j, "window_days", c.window_days);
  read(j, "bin_width_s", c.bin_width_s);
  read(j, "n_groups", c.n_groups);
  read(j, "clip", c.clip);
  read(j, "fit_lag_min", c.fit_lag_min);
  read(j, "fit_lag_max", c.fit_lag_max);
  read(j, "fit_count_weighted", c.fit_count_weighted);
  read(j, "fit_seed", c.fit_seed);
  read(j, "fit_first", c.fit_first);
  read(j, "q_hat", c.q_hat);

  if (c.max_lag < 1) config_error("max_lag", "must be >= 1");
  if (c.K < 1 || c.K > c.max_lag) config_error("K", "must lie in [1, max_lag]");
  if (c.lag_star > c.max_lag) config_error("lag_star", "must not exceed max_lag");
  if (c.tie_rule != "previous" && c.tie_rule != "drop") {
    config_error("tie_rule", "expected \"previous\" or \"drop\"");
  }
  if (c.max_staleness_s && !(*c.max_staleness_s > 0.0)) config_error("max_staleness_s", "must be > 0");
  if (c.window != "month" && c.window != "fixed") {
    config_error("window", "expected \"month\" or \"fixed\"");
  }
  if (!(c.window_days > 0.0)) config_error("window_days", "must be > 0");
  if (!(c.bin_width_s > 0.0)) config_error("bin_width_s", "must be > 0");
  if (c.n_groups < 1) config_error("n_groups", "must be >= 1");
  if (!(c.clip > 0.0)) config_error("clip", "must be > 0");
  return c;
}

json to_json(const AnalysisConfig& c) {
  return json{{"max_lag", c.max_lag},
              {"K", c.K},
              {"lag_star", c.lag_star},
              {"l_sum", c.l_sum},
              {"tie_rule", c.tie_rule},
              {"max_staleness_s", real(c.max_staleness_s)},
              {"split_sessions", c.split_sessions},
              {"window", c.window},
              {"window_days", real(c.window_days)},
              {"bin_width_s", real(c.bin_width_s)},
              {"n_groups", c.n_groups},
              {"clip", real(c.clip)},
              {"fit_lag_min", c.fit_lag_min},
              {"fit_lag_max", c.fit_lag_max ? json(*c.fit_lag_max) : json(nullptr)},
              {"fit_count_weighted", c.fit_count_weighted},
              {"fit_seed", c.fit_seed},
              {"fit_first", c.fit_first},
              {"q_hat", real(c.q_hat)}};
}

ClassifyOptions classify_options(const AnalysisConfig& c) {
  ClassifyOptions o;
  o.tie_rule = c.tie_rule == "drop" ? TieRule::kDrop : TieRule::kPreviousSign;
  if (c.max_staleness_s) {
    o.max_staleness_ns = static_cast<Timestamp>(std::llround(*c.max_staleness_s * 1e9));
  }
  return o;
}

FitOptions fit_options(const AnalysisConfig& c) {
  FitOptions o;
  o.lag_min = c.fit_lag_min;
  o.lag_max = c.fit_lag_max;
  o.count_weighted = c.fit_count_weighted;
  o.seed = c.fit_seed;
  return o;
}

// ---- synthetic configuration ---------------------------------------------

Kernel parse_kernel(const json& j, const std::string& field, const Kernel* base) {
  if (!j.is_object()) config_error(field, "expected an object");
  std::string type = "ramp";
  read(j, "type", type);
  if (type == "ramp") {
    check_keys(j, {"type", "g_inf", "k"}, field);
    double g_inf = 5.0;
    std::size_t k = 10;
    read(j, "g_inf", g_inf);
    read(j, "k", k);
    if (k == 0) config_error(field + ".k", "must be >= 1");
    return Kernel::ramp(g_inf, k);
  }
  if (type == "explicit") {
    check_keys(j, {"type", "g"}, field);
    auto it = j.find("g");
    if (it == j.end() || !it->is_array() || it->empty()) {
      config_error(field + ".g", "expected a non-empty array of increments");
    }
    Kernel k;
    for (const auto& v : *it) {
      if (!v.is_number()) config_error(field + ".g", "increments must be numbers");
      k.g.push_back(v.get<double>());
    }
    return k;
  }
  if (type == "scaled") {
    check_keys(j, {"type", "factor"}, field);
    if (!base) config_error(field, "\"scaled\" is only valid for kernel_off");
    double factor = 1.0;
    read(j, "factor", factor);
    return base->scaled(factor);
  }
  config_error(field + ".type", "expected \"ramp\", \"explicit\" or \"scaled\"");
}

json kernel_json(const Kernel& k) { return json{{"type", "explicit"}, {"g", reals(k.g)}}; }

const std::set<std::string> kSynthKeys = {
    "n_trades",      "phi",           "phi2",        "mix_weight",     "kernel",
    "kernel_off",    "off_fraction",  "noise_sd",    "q",              "price_sign",
    "half_spread",   "label_fraction", "notional_mean", "typical_spread", "initial_mid",
    "start_ts_ns",   "trade_interval_ns", "product",  "seed"};

SynthConfig parse_synth(const json& j) {
  check_keys(j, kSynthKeys, "");
  SynthConfig c;
  read(j, "n_trades", c.n_trades);
  read(j, "phi", c.phi);
  read(j, "phi2", c.phi2);
  read(j, "mix_weight", c.mix_weight);
  if (auto it = j.find("kernel"); it != j.end() && !it->is_null()) {
    c.kernel = parse_kernel(*it, "kernel", nullptr);
  }
  if (auto it = j.find("kernel_off"); it != j.end() && !it->is_null()) {
    c.kernel_off = parse_kernel(*it, "kernel_off", &c.kernel);
  }
  read(j, "off_fraction", c.off_fraction);
  read(j, "noise_sd", c.noise_sd);
  read(j, "q", c.q);
  std::string price_sign = "true";
  read(j, "price_sign", price_sign);
  if (price_sign == "true") {
    c.price_sign = TradePriceSign::kTrue;
  } else if (price_sign == "reported") {
    c.price_sign = TradePriceSign::kReported;
  } else if (price_sign == "noisy") {
    c.price_sign = TradePriceSign::kNoisy;
  } else {
    config_error("price_sign", "expected \"true\", \"reported\" or \"noisy\"");
  }
  read(j, "half_spread", c.half_spread);
  read(j, "label_fraction", c.label_fraction);
  read(j, "notional_mean", c.notional_mean);
  read(j, "typical_spread", c.typical_spread);
  read(j, "initial_mid", c.initial_mid);
  read(j, "start_ts_ns", c.start_ts);
  read(j, "trade_interval_ns", c.trade_interval_ns);
  read(j, "product", c.product);
  read(j, "seed", c.seed);
  if (c.product.empty() || c.product.find(',') != std::string::npos) {
    config_error("product", "must be non-empty and free of commas");
  }
  validate(c);
  return c;
}

std::string_view to_string(TradePriceSign s) {
  switch (s) {
    case TradePriceSign::kTrue: return "true";
    case TradePriceSign::kReported: return "reported";
    case TradePriceSign::kNoisy: return "noisy";
  }
  return "true";
}

json to_json(const SynthConfig& c) {
  return json{{"n_trades", c.n_trades},
              {"phi", real(c.phi)},
              {"phi2", real(c.phi2)},
              {"mix_weight", real(c.mix_weight)},
              {"kernel", kernel_json(c.kernel)},
              {"kernel_off", c.kernel_off ? kernel_json(*c.kernel_off) : json(nullptr)},
              {"off_fraction", real(c.off_fraction)},
              {"noise_sd", real(c.noise_sd)},
              {"q", real(c.q)},
              {"price_sign", to_string(c.price_sign)},
              {"half_spread", real(c.half_spread)},
              {"label_fraction", real(c.label_fraction)},
              {"notional_mean", real(c.notional_mean)},
              {"typical_spread", real(c.typical_spread)},
              {"initial_mid", real(c.initial_mid)},
              {"start_ts_ns", c.start_ts},
              {"trade_interval_ns", c.trade_interval_ns},
              {"product", c.product},
              {"seed", c.seed}};
}

// ---- output helpers -------------------------------------------------------

json meta_json(const OutputMeta& meta) {
  return json{{"tool", "otcimpact"},
              {"version", tool_version()},
              {"command", meta.command},
              {"config_hash", meta.config_hash},
              {"seed", meta.seed ? json(*meta.seed) : json(nullptr)}};
}

json fit_json(const FitParams& p) {
  return json{{"form", to_string(p.form)},
              {"a", real(p.a)},
              {"b", real(p.b)},
              {"nu", real(p.nu)},
              {"sse", real(p.sse)},
              {"lag_min", p.lag_min},
              {"lag_max", p.lag_max},
              {"evaluations", p.evaluations},
              {"degenerate", p.degenerate}};
}

struct Output {
  fs::path dir;
  OutputMeta meta;
  json config;

  void csv(const std::string& name, const std::function<void(std::ostream&)>& body) const {
    std::ostringstream s;
    body(s);
    write_file(dir / name, s.str());
  }

  // meta and config lead every JSON document.
  void doc(const std::string& name, json body) const {
    body["meta"] = meta_json(meta);
    body["config"] = config;
    write_file(dir / name, body.dump(2) + "\n");
  }
};

Output make_output(const std::string& dir, const std::string& command, const json& effective,
                   std::optional<std::uint64_t> seed) {
  if (dir.empty()) throw Error(ErrorCode::kInvalidConfig, "--out is required", "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message(), "out");
  return Output{dir, OutputMeta{command, config_hash(effective), seed}, effective};
}

LagCurve truncated(const LagCurve& c, std::size_t max_lag) {
  LagCurve out(c.kind, max_lag);
  std::copy_n(c.values.begin(), max_lag + 1, out.values.begin());
  std::copy_n(c.counts.begin(), max_lag + 1, out.counts.begin());
  return out;
}

// ---- shared pipeline pieces ----------------------------------------------

struct Inputs {
  std::vector<std::string> trades;
  std::vector<std::string> quotes;
};

struct Classified {
  Tape tape;
  ClassifiedTape signed_tape;
};

Classified load_and_classify(const std::string& trades, const std::string& quotes,
                             const AnalysisConfig& c) {
  Classified out;
  out.tape = load_tape(trades, quotes);
  out.signed_tape = classify_all(out.tape, classify_options(c));
  if (out.signed_tape.trades.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no trade could be signed");
  }
  return out;
}

Classified single_input(const Inputs& in, const AnalysisConfig& c) {
  if (in.trades.size() != 1 || in.quotes.size() != 1) {
    throw Error(ErrorCode::kInvalidConfig, "expected exactly one --trades and one --quotes file",
                "trades");
  }
  return load_and_classify(in.trades[0], in.quotes[0], c);
}

std::vector<std::int64_t> sessions_for(const std::vector<SignedTrade>& trades,
                                       const AnalysisConfig& c) {
  return c.split_sessions ? session_ids(trades) : std::vector<std::int64_t>{};
}

struct Curves {
  LagCurve c;  // on 0..stat_lag
  LagCurve r;
};

Curves curves_for(const std::vector<SignedTrade>& trades, const AnalysisConfig& c) {
  const auto sessions = sessions_for(trades, c);
  const auto eps = signs_of(trades);
  return {autocorr(eps, c.stat_lag(), sessions), response(trades, c.stat_lag(), sessions)};
}

json report_json(const ClassifyReport& r) {
  return json{{"n_input", r.n_input},
              {"n_signed", r.n_signed},
              {"dropped_no_quote", r.dropped_no_quote},
              {"dropped_stale", r.dropped_stale},
              {"ties", r.ties},
              {"dropped_ties", r.dropped_ties}};
}

json accuracy_json(const std::vector<SignedTrade>& trades) {
  const bool any = std::any_of(trades.begin(), trades.end(), is_labeled);
  if (!any) return nullptr;
  const auto acc = label_accuracy(trades);
  return json{{"q_hat", real(acc.q_hat)}, {"n_labeled", acc.n_labeled},
              {"n_correct", acc.n_correct}};
}

// ---- commands -------------------------------------------------------------

void cmd_simulate(const json& raw, const std::string& out_dir) {
  const auto cfg = parse_synth(raw);
  const auto effective = to_json(cfg);
  const auto out = make_output(out_dir, "simulate", effective, cfg.seed);
  const auto data = make_dataset(cfg);

  out.csv("trades.csv", [&](std::ostream& s) { write_trades_csv(s, data.tape.trades, &out.meta); });
  out.csv("quotes.csv", [&](std::ostream& s) { write_quotes_csv(s, data.quotes, &out.meta); });

  const auto& t = data.truth;
  json kernel_on{{"g", reals(t.kernel.g)}, {"plateau", real(t.kernel.plateau())}};
  json kernel_off{{"g", reals(t.kernel_off.g)}, {"plateau", real(t.kernel_off.plateau())}};
  json truth{{"phi", real(t.phi)},
             {"phi2", real(t.phi2)},
             {"mix_weight", real(t.mix_weight)},
             {"n_eff", real(t.n_eff)},
             {"q", real(t.q)},
             {"kernel", kernel_on},
             {"kernel_off", kernel_off},
             {"off_fraction", real(t.off_fraction)},
             {"noise_sd", real(t.noise_sd)},
             {"rebase_scale", real(t.rebase_scale)},
             {"plateau_rebased", real(t.kernel.plateau() * t.rebase_scale)},
             {"plateau_off_rebased", real(t.kernel_off.plateau() * t.rebase_scale)},
             {"seed", t.seed},
             {"n_trades", t.n_trades},
             {"product", cfg.product}};
  out.doc("ground_truth.json", std::move(truth));
}

void cmd_classify(const AnalysisConfig& c, const json& effective, const Inputs& in,
                  const std::string& out_dir) {
  const auto out = make_output(out_dir, "classify", effective, std::nullopt);
  const auto data = single_input(in, c);
  const auto& trades = data.signed_tape.trades;
  const double scale = kRebaseLevel / data.tape.rebased.mean_spread;
  out.csv("signed_trades.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "id,ts_ns,product,venue,price,mid_before,eps,tie,true_sign\n";
    for (const auto& st : trades) {
      s << st.trade.id << ',' << st.trade.ts << ',' << st.trade.product << ','
        << to_string(st.trade.venue) << ',' << format_real(st.trade.spread * scale) << ','
        << format_real(st.mid_before) << ',' << static_cast<int>(st.eps) << ','
        << (st.tie ? 1 : 0) << ',';
      if (st.trade.true_sign) s << static_cast<int>(*st.trade.true_sign);
      s << '\n';
    }
  });
  auto report = report_json(data.signed_tape.report);
  report["dropped_ids"] = data.signed_tape.report.dropped_ids;
  report["product"] = data.tape.product;
  report["mean_spread_bps"] = real(data.tape.rebased.mean_spread);
  report["label_accuracy"] = accuracy_json(trades);
  out.doc("classify_report.json", std::move(report));
}

void cmd_estimate(const AnalysisConfig& c, const json& effective, const Inputs& in,
                  const std::string& out_dir) {
  const auto out = make_output(out_dir, "estimate", effective, std::nullopt);
  const auto data = single_input(in, c);
  const auto& trades = data.signed_tape.trades;
  const auto curves = curves_for(trades, c);

  out.csv("autocorr.csv", [&](std::ostream& s) { write_curve_csv(s, curves.c, &out.meta); });
  out.csv("response.csv", [&](std::ostream& s) { write_curve_csv(s, curves.r, &out.meta); });
  out.csv("cumulative_autocorr.csv",
          [&](std::ostream& s) { write_curve_csv(s, cumulative(curves.c), &out.meta); });

  WindowSpec spec;
  if (c.window == "fixed") {
    spec.kind = WindowSpec::Kind::kFixed;
    spec.width_ns = static_cast<Timestamp>(std::llround(c.window_days * 86400.0 * 1e9));
  }
  const auto windows = windowed_stats(trades, spec, {c.l_sum, c.l_sum, c.lag_star});
  out.csv("windows.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "window_start_ns,window_end_ns,n_trades,low_sample,n_eff,r_at\n";
    for (const auto& w : windows) {
      s << w.window_start << ',' << w.window_end << ',' << w.n_trades << ','
        << (w.low_sample ? 1 : 0) << ',' << (w.n_eff ? format_real(*w.n_eff) : "") << ','
        << (w.r_at ? format_real(*w.r_at) : "") << '\n';
    }
  });
  out.csv("window_cumulative.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "window_start_ns,lag,value,count\n";
    for (const auto& w : windows) {
      if (!w.cum_autocorr) continue;
      for (std::size_t l = 0; l < w.cum_autocorr->values.size(); ++l) {
        s << w.window_start << ',' << l << ',' << format_real(w.cum_autocorr->values[l]) << ','
          << w.cum_autocorr->counts[l] << '\n';
      }
    }
  });

  const auto sizes = size_distribution(data.tape.trades, restrict_to_present(venue_scheme(),
                                                                               data.tape.trades));
  json size_summary = json::object();
  out.csv("sizes.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "category,bin_lo,bin_hi,mass\n";
    for (const auto& d : sizes) {
      for (std::size_t b = 0; b < d.mass.size(); ++b) {
        s << d.category << ',' << format_real(d.edges[b]) << ',' << format_real(d.edges[b + 1])
          << ',' << format_real(d.mass[b]) << '\n';
      }
      s << d.category << ',' << format_real(d.edges.back()) << ",inf,"
        << format_real(d.overflow_mass) << '\n';
      size_summary[d.category] = json{{"n", d.n}, {"mean_notional", real(d.mean_notional)},
                                      {"overflow_mass", real(d.overflow_mass)}};
    }
  });

  json body{{"product", data.tape.product},
            {"n_trades", trades.size()},
            {"n_eff", real(n_eff(curves.c, c.l_sum))},
            {"r_at_lag_star", real(curves.r[c.lag_star])},
            {"classify", report_json(data.signed_tape.report)},
            {"label_accuracy", accuracy_json(trades)},
            {"sizes", size_summary}};
  out.doc("estimate.json", std::move(body));
}

void cmd_propagator(const AnalysisConfig& c, const json& effective, const Inputs& in,
                    const std::string& out_dir) {
  const auto out = make_output(out_dir, "propagator", effective, std::nullopt);
  const auto data = single_input(in, c);
  const auto curves = curves_for(data.signed_tape.trades, c);
  const auto cc = truncated(curves.c, c.max_lag);
  const auto rr = truncated(curves.r, c.max_lag);
  const auto sol = solve_propagator(cc, rr, c.K);
  const auto fwd = forward_response(sol, cc);
  const double ne = n_eff(curves.c, c.l_sum);

  out.csv("propagator.csv", [&](std::ostream& s) { write_kernel_csv(s, sol, &out.meta); });
  out.csv("bounds.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "lag,R,R_model,lower,upper\n";
    for (std::size_t l = 0; l <= c.max_lag; ++l) {
      s << l << ',' << format_real(rr[l]) << ',' << format_real(fwd[l]) << ','
        << format_real(bound_lower(rr[l], ne)) << ',' << format_real(bound_upper(rr[l], ne))
        << '\n';
    }
  });
  json body{{"product", data.tape.product},
            {"K", sol.K},
            {"residual_norm", real(sol.residual_norm)},
            {"condition", real(sol.condition)},
            {"ridge_applied", sol.ridge_applied},
            {"n_eff", real(ne)},
            {"plateau", real(sol.G[c.K])},
            {"g_at_lag_star", real(sol.G[c.lag_star])},
            {"r_at_lag_star", real(rr[c.lag_star])},
            {"bound_lower", real(bound_lower(rr[c.lag_star], ne))},
            {"bound_upper", real(bound_upper(rr[c.lag_star], ne))}};
  out.doc("propagator.json", std::move(body));
}

void cmd_debias(const AnalysisConfig& c, const json& effective, const Inputs& in,
                const std::string& out_dir) {
  const auto out = make_output(out_dir, "debias", effective, c.fit_seed);
  const auto data = single_input(in, c);
  const auto& trades = data.signed_tape.trades;
  const auto curves = curves_for(trades, c);

  json accuracy = accuracy_json(trades);
  double q = 0.0;
  if (c.q_hat) {
    q = *c.q_hat;
  } else {
    if (accuracy.is_null()) throw Error(ErrorCode::kNoLabels, "debias needs labeled trades or q_hat");
    q = accuracy["q_hat"].get<double>();
  }
  const auto c_corr = c_true(trades, q, c.stat_lag());
  const auto r_corr = r_true(curves.r, q);
  const auto corrected = g_true(truncated(c_corr, c.max_lag), truncated(r_corr, c.max_lag),
                                c.fit_first, c.K, fit_options(c));

  out.csv("corrected_autocorr.csv", [&](std::ostream& s) { write_curve_csv(s, c_corr, &out.meta); });
  out.csv("corrected_response.csv", [&](std::ostream& s) { write_curve_csv(s, r_corr, &out.meta); });
  out.csv("corrected_propagator.csv",
          [&](std::ostream& s) { write_kernel_csv(s, corrected.solution, &out.meta); });
  const auto& sol = corrected.solution;
  json body{{"product", data.tape.product},
            {"corrected", true},
            {"q_hat", real(q)},
            {"q_source", c.q_hat ? "config" : "labels"},
            {"label_accuracy", accuracy},
            {"fit_first", c.fit_first},
            {"c_fit", corrected.c_fit ? fit_json(*corrected.c_fit) : json(nullptr)},
            {"r_fit", corrected.r_fit ? fit_json(*corrected.r_fit) : json(nullptr)},
            {"n_eff", real(n_eff(c_corr, c.l_sum))},
            {"K", sol.K},
            {"residual_norm", real(sol.residual_norm)},
            {"condition", real(sol.condition)},
            {"ridge_applied", sol.ridge_applied},
            {"plateau", real(sol.G[c.K])},
            {"g_at_lag_star", real(sol.G[c.lag_star])}};
  out.doc("debias.json", std::move(body));
}

void cmd_multiprop(const AnalysisConfig& c, const json& effective, const Inputs& in,
                   const std::string& out_dir) {
  const auto out = make_output(out_dir, "multiprop", effective, std::nullopt);
  const auto data = single_input(in, c);
  const auto& trades = data.signed_tape.trades;
  const auto scheme = venue_scheme();

  const auto cross = cross_corr(trades, scheme, c.max_lag);
  const auto responses = category_response(trades, scheme, c.max_lag);
  const auto autocorrs = category_autocorr(trades, scheme, c.stat_lag());
  const auto sol = solve_multi(cross, responses, c.K);

  std::vector<double> n_effs;
  for (const auto& a : autocorrs) n_effs.push_back(n_eff(a, c.l_sum));
  const auto bounds = category_bounds(responses, n_effs, scheme.categories, c.lag_star);

  auto curves_csv = [&](const std::vector<LagCurve>& curves) {
    return [&](std::ostream& s) {
      s << csv_meta_line(out.meta) << '\n';
      s << "category,lag,value,count\n";
      for (std::size_t k = 0; k < curves.size(); ++k) {
        for (std::size_t l = 0; l < curves[k].values.size(); ++l) {
          s << scheme.categories[k] << ',' << l << ',' << format_real(curves[k].values[l]) << ','
            << curves[k].counts[l] << '\n';
        }
      }
    };
  };
  out.csv("category_response.csv", curves_csv(responses));
  out.csv("category_autocorr.csv", curves_csv(autocorrs));
  out.csv("cross_corr.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "rho,pi,lag,value,count\n";
    for (std::size_t rho = 0; rho < scheme.size(); ++rho) {
      for (std::size_t pi = 0; pi < scheme.size(); ++pi) {
        for (std::size_t l = 0; l <= cross.max_lag; ++l) {
          s << scheme.categories[rho] << ',' << scheme.categories[pi] << ',' << l << ','
            << format_real(cross.at(rho, pi, static_cast<long>(l))) << ',' << cross.counts[l]
            << '\n';
        }
      }
    }
  });
  out.csv("category_propagator.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "category,lag,g,G\n";
    for (std::size_t k = 0; k < sol.kernels.size(); ++k) {
      const auto& ker = sol.kernels[k];
      for (std::size_t l = 0; l < ker.G.values.size(); ++l) {
        s << scheme.categories[k] << ',' << l << ','
          << format_real(l < ker.g.size() ? ker.g[l] : 0.0) << ',' << format_real(ker.G[l])
          << '\n';
      }
    }
  });
  out.csv("category_bounds.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "category,lag,n_eff,R,lower,upper\n";
    for (std::size_t k = 0; k < bounds.size(); ++k) {
      s << bounds[k].category << ',' << c.lag_star << ',' << format_real(bounds[k].n_eff) << ','
        << format_real(responses[k][c.lag_star]) << ',' << format_real(bounds[k].lower) << ','
        << format_real(bounds[k].upper) << '\n';
    }
  });

  json freq = json::object(), plateaus = json::object(), at_star = json::object();
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    freq[scheme.categories[k]] = real(sol.frequencies[k]);
    plateaus[scheme.categories[k]] = real(sol.kernels[k].G[c.K]);
    at_star[scheme.categories[k]] = real(sol.kernels[k].G[c.lag_star]);
  }
  json body{{"product", data.tape.product},
            {"categories", scheme.categories},
            {"frequencies", freq},
            {"response_convention", "conditional_mean"},
            {"K", c.K},
            {"residual_norm", real(sol.residual_norm)},
            {"condition", real(sol.condition)},
            {"ridge_applied", sol.ridge_applied},
            {"plateau", plateaus},
            {"g_at_lag_star", at_star}};
  out.doc("multiprop.json", std::move(body));
}

void cmd_bins(const AnalysisConfig& c, const json& effective, const Inputs& in,
              const std::string& out_dir) {
  const auto out = make_output(out_dir, "bins", effective, std::nullopt);
  const auto data = single_input(in, c);
  const auto width = static_cast<Timestamp>(std::llround(c.bin_width_s * 1e9));
  const auto bins = bin_imbalance(data.signed_tape.trades, data.tape.rebased, width);
  const auto profile = bin_profile(bins, c.n_groups, c.clip);

  out.csv("bins.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "bin_start_ns,imbalance,ret,n_trades\n";
    for (const auto& b : bins) {
      s << b.bin_start << ',' << format_real(b.imbalance) << ',' << format_real(b.ret) << ','
        << b.n_trades << '\n';
    }
  });
  out.csv("profile.csv", [&](std::ostream& s) {
    s << csv_meta_line(out.meta) << '\n';
    s << "group,mean_x,mean_y,stderr_y,n\n";
    for (std::size_t g = 0; g < profile.size(); ++g) {
      s << g << ',' << format_real(profile[g].mean_x) << ',' << format_real(profile[g].mean_y)
        << ',' << format_real(profile[g].stderr_y) << ',' << profile[g].n << '\n';
    }
  });
  const auto nonempty = std::count_if(bins.begin(), bins.end(),
                                      [](const BinRecord& b) { return b.n_trades > 0; });
  json body{{"product", data.tape.product},
            {"n_bins", bins.size()},
            {"n_nonempty", nonempty},
            {"n_groups", profile.size()}};
  out.doc("bins.json", std::move(body));
}

void write_fit(const Output& out, const std::string& stem, const FitParams& p, CurveKind kind,
               std::size_t max_lag) {
  out.doc(stem + ".json", fit_json(p));
  const auto curve = fitted_curve(p, kind, max_lag);
  out.csv("fitted_" + stem.substr(stem.find('_') + 1) + ".csv",
          [&](std::ostream& s) { write_curve_csv(s, curve, &out.meta); });
}

void cmd_fit(const AnalysisConfig& c, const json& effective, const Inputs& in,
             const std::string& curve_path, const std::string& form_text,
             const std::string& out_dir) {
  const auto out = make_output(out_dir, "fit", effective, c.fit_seed);
  const auto opts = fit_options(c);
  if (!curve_path.empty()) {
    const auto form = parse_fit_form(form_text);
    if (!form) throw Error(ErrorCode::kInvalidConfig, "--form must be decay or saturating", "form");
    const auto kind = *form == FitForm::kDecay ? CurveKind::kAutocorr : CurveKind::kResponse;
    const auto curve = read_curve_csv(curve_path, kind);
    write_fit(out, "fit_curve", fit_stretched(curve, *form, opts), kind, curve.max_lag());
    return;
  }
  const auto data = single_input(in, c);
  const auto curves = curves_for(data.signed_tape.trades, c);
  const auto cc = truncated(curves.c, c.max_lag);
  const auto rr = truncated(curves.r, c.max_lag);
  write_fit(out, "fit_autocorr", fit_stretched(cc, FitForm::kDecay, opts), CurveKind::kAutocorr,
            c.max_lag);
  write_fit(out, "fit_response", fit_stretched(rr, FitForm::kSaturating, opts),
            CurveKind::kResponse, c.max_lag);
}

void cmd_report(const AnalysisConfig& c, const json& effective, const Inputs& in,
                const std::string& out_dir) {
  const auto out = make_output(out_dir, "report", effective, std::nullopt);
  if (in.trades.empty() || in.trades.size() != in.quotes.size()) {
    throw Error(ErrorCode::kInvalidConfig, "give --trades and --quotes in matching pairs",
                "trades");
  }
  json products = json::object();
  for (std::size_t i = 0; i < in.trades.size(); ++i) {
    const auto data = load_and_classify(in.trades[i], in.quotes[i], c);
    if (products.contains(data.tape.product)) {
      throw Error(ErrorCode::kInvalidConfig, "product '" + data.tape.product + "' given twice",
                  "trades");
    }
    const auto& trades = data.signed_tape.trades;
    const auto curves = curves_for(trades, c);
    const auto sol = solve_propagator(truncated(curves.c, c.max_lag),
                                      truncated(curves.r, c.max_lag), c.K);
    const double ne = n_eff(curves.c, c.l_sum);
    const double r30 = curves.r[c.lag_star];
    double intertrade = 0.0;
    if (trades.size() > 1) {
      intertrade = static_cast<double>(trades.back().trade.ts - trades.front().trade.ts) /
                   static_cast<double>(trades.size() - 1) / 1e9;
    }
    products[data.tape.product] = json{{"n_trades", trades.size()},
                                       {"mean_intertrade_s", real(intertrade)},
                                       {"n_eff", real(ne)},
                                       {"r_30", real(r30)},
                                       {"g_30", real(sol.G[c.lag_star])},
                                       {"bound_lower", real(bound_lower(r30, ne))},
                                       {"bound_upper", real(bound_upper(r30, ne))},
                                       {"plateau", real(sol.G[c.K])},
                                       {"residual_norm", real(sol.residual_norm)},
                                       {"label_accuracy", accuracy_json(trades)},
                                       {"classify", report_json(data.signed_tape.report)}};
  }
  json body{{"lag_star", c.lag_star}, {"products", products}};
  out.doc("report.json", std::move(body));
}

// ---- argument handling ----------------------------------------------------

struct AnalysisFlags {
  std::optional<std::size_t> max_lag, K, lag_star, l_sum, n_groups, fit_lag_min, fit_lag_max;
  std::optional<std::string> tie_rule, window;
  std::optional<double> max_staleness_s, bin_width_s, clip, q_hat, window_days;
  std::optional<std::uint64_t> fit_seed;
  bool split_sessions = false;
  bool no_fit_first = false;

  void add(CLI::App* app) {
    app->add_option("--max-lag", max_lag, "Largest lag of C, R and G (default 60)");
    app->add_option("-K,--truncation", K, "Propagator truncation (default 30)");
    app->add_option("--lag-star", lag_star, "Reporting lag (default 30)");
    app->add_option("--l-sum", l_sum, "Lags summed into N_eff (default 100)");
    app->add_option("--tie-rule", tie_rule, "previous | drop");
    app->add_option("--max-staleness", max_staleness_s, "Drop trades with older quotes (seconds)");
    app->add_flag("--split-sessions", split_sessions, "Skip lag pairs spanning UTC days");
    app->add_option("--window", window, "month | fixed");
    app->add_option("--window-days", window_days, "Fixed window width in days");
    app->add_option("--bin-width", bin_width_s, "Clock-time bin width in seconds (default 900)");
    app->add_option("--groups", n_groups, "Profile groups (default 30)");
    app->add_option("--clip", clip, "Profile clip in standard deviations (default 3)");
    app->add_option("--fit-lag-min", fit_lag_min, "First lag used by the fits (default 1)");
    app->add_option("--fit-lag-max", fit_lag_max, "Last lag used by the fits (default max lag)");
    app->add_option("--fit-seed", fit_seed, "Seed for the fit start points");
    app->add_flag("--no-fit-first", no_fit_first, "Solve debiased curves without smoothing fits");
    app->add_option("--q-hat", q_hat, "Use this label accuracy instead of estimating it");
  }

  void apply(json& j) const {
    auto set = [&](const char* key, const auto& v) {
      if (v) j[key] = *v;
    };
    set("max_lag", max_lag);
    set("K", K);
    set("lag_star", lag_star);
    set("l_sum", l_sum);
    set("tie_rule", tie_rule);
    set("max_staleness_s", max_staleness_s);
    set("window", window);
    set("window_days", window_days);
    set("bin_width_s", bin_width_s);
    set("n_groups", n_groups);
    set("clip", clip);
    set("fit_lag_min", fit_lag_min);
    set("fit_lag_max", fit_lag_max);
    set("fit_seed", fit_seed);
    set("q_hat", q_hat);
    if (split_sessions) j["split_sessions"] = true;
    if (no_fit_first) j["fit_first"] = false;
  }
};

void print_error(std::ostream& err, const Error& e) {
  json body{{"code", to_string(e.code())},
            {"message", e.what()},
            {"field", e.field().empty() ? json(nullptr) : json(e.field())},
            {"line", e.line() > 0 ? json(e.line()) : json(nullptr)}};
  err << json{{"error", body}}.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Price impact estimation for trade and quote tapes", "otcimpact"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir, curve_path, form = "decay";
  Inputs inputs;
  AnalysisFlags flags;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_trades;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic tape with ground truth");
  simulate->add_option("--config", config_path, "Synthetic tape configuration (JSON)");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--seed", seed, "Override the configured seed");
  simulate->add_option("--n-trades", n_trades, "Override the configured tape length");

  const std::vector<std::pair<std::string, std::string>> analysis_commands = {
      {"classify", "Sign trades against the prevailing mid"},
      {"estimate", "Sign autocorrelation, response, N_eff, windows and size distributions"},
      {"propagator", "Deconvolve the propagator and its bounds"},
      {"debias", "Correct C, R and G for sign misclassification"},
      {"multiprop", "Per-venue cross-correlations and propagators"},
      {"bins", "Clock-time order imbalance bins and their profile"},
      {"fit", "Stretched exponential fits of C and R, or of a curve file"},
      {"report", "Summary of N_eff, R and G per product"}};
  for (const auto& [name, help] : analysis_commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Analysis configuration (JSON)");
    sub->add_option("--out", out_dir, "Output directory")->required();
    const bool optional_tape = name == "fit";
    auto* trades = sub->add_option("--trades", inputs.trades, "Trades CSV");
    auto* quotes = sub->add_option("--quotes", inputs.quotes, "Quotes CSV");
    if (!optional_tape) {
      trades->required();
      quotes->required();
    }
    if (name != "report") {
      trades->expected(1);
      quotes->expected(1);
    }
    if (name == "fit") {
      sub->add_option("--curve", curve_path, "lag,value,count CSV to fit instead of a tape");
      sub->add_option("--form", form, "decay | saturating (with --curve)");
    }
    flags.add(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n";
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    err << target->help();
    return kExitUsage;
  }

  try {
    json raw = load_config(config_path);
    const auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    if (command == "simulate") {
      if (seed) raw["seed"] = *seed;
      if (n_trades) raw["n_trades"] = *n_trades;
      cmd_simulate(raw, out_dir);
      return kExitOk;
    }
    flags.apply(raw);
    const auto cfg = parse_analysis(raw);
    const auto effective = to_json(cfg);
    if (command == "classify") cmd_classify(cfg, effective, inputs, out_dir);
    if (command == "estimate") cmd_estimate(cfg, effective, inputs, out_dir);
    if (command == "propagator") cmd_propagator(cfg, effective, inputs, out_dir);
    if (command == "debias") cmd_debias(cfg, effective, inputs, out_dir);
    if (command == "multiprop") cmd_multiprop(cfg, effective, inputs, out_dir);
    if (command == "bins") cmd_bins(cfg, effective, inputs, out_dir);
    if (command == "fit") cmd_fit(cfg, effective, inputs, curve_path, form, out_dir);
    if (command == "report") cmd_report(cfg, effective, inputs, out_dir);
    return kExitOk;
  } catch (const Error& e) {
    print_error(err, e);
    return kExitDataError;
  } catch (const json::exception& e) {
    print_error(err, Error(ErrorCode::kInvalidConfig, e.what(), "config"));
    return kExitDataError;
  } catch (const std::bad_alloc&) {
    throw;
  }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"otcimpact"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace otcimpact
