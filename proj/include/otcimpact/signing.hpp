#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "otcimpact/domain.hpp"
#include "otcimpact/ingest.hpp"

namespace otcimpact {

/// What to do when the trade price equals the prevailing mid.
enum class TieRule {
  kPreviousSign,  // reuse the previous signed trade's eps (+1 for the first)
  kDrop,
};

struct ClassifyOptions {
  TieRule tie_rule = TieRule::kPreviousSign;
  /// Drop trades whose prevailing quote is older than this. Unset: no limit.
  std::optional<Timestamp> max_staleness_ns;
};

struct Classification {
  Sign eps = 1;
  bool tie = false;
};

/// eps = sign(p - m). On a tie, eps = previous and tie is set.
Classification classify(double trade_price, double mid, Sign previous = 1);

struct ClassifyReport {
  std::size_t n_input = 0;
  std::size_t n_signed = 0;
  std::size_t dropped_no_quote = 0;
  std::size_t dropped_stale = 0;
  std::size_t ties = 0;          // ties that were signed by the tie rule
  std::size_t dropped_ties = 0;  // ties removed under TieRule::kDrop
  std::vector<std::uint64_t> dropped_ids;
};

struct ClassifiedTape {
  std::vector<SignedTrade> trades;
  ClassifyReport report;
};

/// Rebases each trade price with the tape's mean spread and signs it against
/// the prevailing mid.
ClassifiedTape classify_all(const Tape& tape, const ClassifyOptions& options = {});

struct LabelAccuracy {
  double q_hat = 0.0;
  std::size_t n_labeled = 0;
  std::size_t n_correct = 0;
};

/// Fraction of labeled trades whose detected sign matches the label. Throws
/// NO_LABELS when no trade carries a label.
LabelAccuracy label_accuracy(std::span<const SignedTrade> trades);

std::vector<Sign> signs_of(std::span<const SignedTrade> trades);
std::vector<double> mids_of(std::span<const SignedTrade> trades);

}  // namespace otcimpact
