#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcimpact/domain.hpp"

namespace otcimpact {

/// Header names for each logical trade column. venue and true_sign are
/// optional columns; the rest must be present.
struct TradeSchema {
  std::string ts = "ts_ns";
  std::string product = "product";
  std::string spread = "spread_bps";
  std::string notional = "notional";
  std::string venue = "venue";
  std::string true_sign = "true_sign";
};

struct QuoteSchema {
  std::string ts = "ts_ns";
  std::string product = "product";
  std::string spread = "spread_bps";
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;  // stable-sorted by timestamp
  /// Rows whose timestamp is earlier than the row before them.
  std::size_t out_of_order = 0;
};

/// Lines starting with '#' are metadata and skipped. Trade ids are assigned
/// from input row order.
ParseResult<Trade> parse_trades(std::istream& in, const TradeSchema& schema = {});
ParseResult<Trade> parse_trades(const std::filesystem::path& path,
                                const TradeSchema& schema = {});
ParseResult<Quote> parse_quotes(std::istream& in, const QuoteSchema& schema = {});
ParseResult<Quote> parse_quotes(const std::filesystem::path& path,
                                const QuoteSchema& schema = {});

RebasedSeries rebase(std::span<const Quote> quotes);

/// Index of the latest point with ts strictly before trade_ts, if any.
std::optional<std::size_t> prevailing_index(Timestamp trade_ts, const RebasedSeries& series);

/// Rebased mid of the latest quote strictly before trade_ts. Throws
/// NO_PRIOR_QUOTE when the trade precedes the first quote.
double prevailing_mid(Timestamp trade_ts, const RebasedSeries& series);

/// Last rebased mid at or before ts (inclusive), used for bin boundaries.
std::optional<double> mid_at_or_before(Timestamp ts, const RebasedSeries& series);

struct Tape {
  std::string product;
  std::vector<Trade> trades;
  RebasedSeries rebased;
};

/// Rebases the quotes and checks every trade and quote shares one product.
Tape make_tape(std::vector<Trade> trades, std::span<const Quote> quotes);
Tape load_tape(const std::filesystem::path& trades_csv,
               const std::filesystem::path& quotes_csv);

}  // namespace otcimpact
