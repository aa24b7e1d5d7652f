#include "otcimpact/signing.hpp"

namespace otcimpact {

Classification classify(double trade_price, double mid, Sign previous) {
  const double diff = trade_price - mid;
  if (diff > 0.0) return {1, false};
  if (diff < 0.0) return {-1, false};
  return {previous, true};
}

ClassifiedTape classify_all(const Tape& tape, const ClassifyOptions& options) {
  ClassifiedTape out;
  auto& report = out.report;
  report.n_input = tape.trades.size();
  out.trades.reserve(tape.trades.size());

  const auto& series = tape.rebased;
  Sign previous = 1;
  for (const auto& trade : tape.trades) {
    const auto idx = prevailing_index(trade.ts, series);
    if (!idx) {
      ++report.dropped_no_quote;
      report.dropped_ids.push_back(trade.id);
      continue;
    }
    const auto& quote = series.points[*idx];
    if (options.max_staleness_ns && trade.ts - quote.ts > *options.max_staleness_ns) {
      ++report.dropped_stale;
      report.dropped_ids.push_back(trade.id);
      continue;
    }
    const double price = kRebaseLevel * trade.spread / series.mean_spread;
    const auto cls = classify(price, quote.m, previous);
    if (cls.tie && options.tie_rule == TieRule::kDrop) {
      ++report.dropped_ties;
      report.dropped_ids.push_back(trade.id);
      continue;
    }
    if (cls.tie) ++report.ties;
    previous = cls.eps;
    out.trades.push_back({trade, quote.m, cls.eps, cls.tie});
  }
  report.n_signed = out.trades.size();
  return out;
}

LabelAccuracy label_accuracy(std::span<const SignedTrade> trades) {
  LabelAccuracy acc;
  for (const auto& st : trades) {
    if (!st.trade.true_sign) continue;
    ++acc.n_labeled;
    if (*st.trade.true_sign == st.eps) ++acc.n_correct;
  }
  if (acc.n_labeled == 0) throw Error(ErrorCode::kNoLabels, "no trade carries a true_sign label");
  acc.q_hat = static_cast<double>(acc.n_correct) / static_cast<double>(acc.n_labeled);
  return acc;
}

std::vector<Sign> signs_of(std::span<const SignedTrade> trades) {
  std::vector<Sign> out;
  out.reserve(trades.size());
  for (const auto& st : trades) out.push_back(st.eps);
  return out;
}

std::vector<double> mids_of(std::span<const SignedTrade> trades) {
  std::vector<double> out;
  out.reserve(trades.size());
  for (const auto& st : trades) out.push_back(st.mid_before);
  return out;
}

}  // namespace otcimpact
