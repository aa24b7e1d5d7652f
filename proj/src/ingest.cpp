#include "otcimpact/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <string_view>

namespace otcimpact {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_row(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

// Reads the header row and maps column names to positions.
class Table {
 public:
  explicit Table(std::istream& in) : in_(in) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line_no_ == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      if (skip_line(line)) continue;
      const auto cols = split_row(line);
      for (std::size_t i = 0; i < cols.size(); ++i) columns_.emplace(std::string(cols[i]), i);
      width_ = cols.size();
      return;
    }
    throw Error(ErrorCode::kEmptyFile, "no header row");
  }

  std::size_t require(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) {
      throw Error(ErrorCode::kSchemaMismatch, "missing column '" + name + "'", name);
    }
    return it->second;
  }

  std::optional<std::size_t> optional(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) return std::nullopt;
    return it->second;
  }

  // Next data row; false at end of input.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, current_)) {
      ++line_no_;
      if (skip_line(current_)) continue;
      fields = split_row(current_);
      if (fields.size() != width_) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(line_no_) + ": expected " +
                        std::to_string(width_) + " fields, got " +
                        std::to_string(fields.size()),
                    {}, line_no_);
      }
      return true;
    }
    return false;
  }

  long line() const { return line_no_; }

 private:
  std::istream& in_;
  std::map<std::string, std::size_t> columns_;
  std::size_t width_ = 0;
  std::string current_;
  long line_no_ = 0;
};

[[noreturn]] void parse_fail(const std::string& field, long line, std::string_view text) {
  throw Error(ErrorCode::kParseError,
              "line " + std::to_string(line) + ": bad " + field + " '" + std::string(text) + "'",
              field, line);
}

Timestamp parse_ts(std::string_view text, const std::string& field, long line) {
  if (text.empty()) {
    throw Error(ErrorCode::kMissingTimestamp, "line " + std::to_string(line) + ": empty " + field,
                field, line);
  }
  Timestamp v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) parse_fail(field, line, text);
  return v;
}

double parse_real(std::string_view text, const std::string& field, long line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    parse_fail(field, line, text);
  }
  return v;
}

std::optional<Sign> parse_sign(std::string_view text, const std::string& field, long line) {
  if (text.empty() || text == "0" || text == "NONE" || text == "none") return std::nullopt;
  if (text == "1" || text == "+1") return Sign{1};
  if (text == "-1") return Sign{-1};
  parse_fail(field, line, text);
}

template <typename Record>
void sort_records(ParseResult<Record>& result) {
  auto& recs = result.records;
  for (std::size_t i = 1; i < recs.size(); ++i) {
    if (recs[i].ts < recs[i - 1].ts) ++result.out_of_order;
  }
  std::stable_sort(recs.begin(), recs.end(),
                   [](const Record& a, const Record& b) { return a.ts < b.ts; });
}

[[noreturn]] void rethrow_with_line(const Violation& v, long line) {
  throw Error(v.code, "line " + std::to_string(line) + ": invalid " + v.field, v.field, line);
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

}  // namespace

ParseResult<Trade> parse_trades(std::istream& in, const TradeSchema& schema) {
  Table table(in);
  const auto c_ts = table.require(schema.ts);
  const auto c_product = table.require(schema.product);
  const auto c_spread = table.require(schema.spread);
  const auto c_notional = table.require(schema.notional);
  const auto c_venue = table.optional(schema.venue);
  const auto c_sign = table.optional(schema.true_sign);

  ParseResult<Trade> result;
  std::vector<std::string_view> f;
  while (table.next(f)) {
    const long line = table.line();
    Trade t;
    t.id = result.records.size();
    t.ts = parse_ts(f[c_ts], schema.ts, line);
    t.product = std::string(f[c_product]);
    t.spread = parse_real(f[c_spread], schema.spread, line);
    t.notional = parse_real(f[c_notional], schema.notional, line);
    if (c_venue) {
      auto venue = parse_venue(f[*c_venue]);
      if (!venue) parse_fail(schema.venue, line, f[*c_venue]);
      t.venue = *venue;
    }
    if (c_sign) t.true_sign = parse_sign(f[*c_sign], schema.true_sign, line);
    if (auto v = validate(t)) rethrow_with_line(*v, line);
    result.records.push_back(std::move(t));
  }
  if (result.records.empty()) throw Error(ErrorCode::kEmptyFile, "no trade rows");
  sort_records(result);
  return result;
}

ParseResult<Trade> parse_trades(const std::filesystem::path& path, const TradeSchema& schema) {
  auto in = open(path);
  return parse_trades(in, schema);
}

ParseResult<Quote> parse_quotes(std::istream& in, const QuoteSchema& schema) {
  Table table(in);
  const auto c_ts = table.require(schema.ts);
  const auto c_product = table.require(schema.product);
  const auto c_spread = table.require(schema.spread);

  ParseResult<Quote> result;
  std::vector<std::string_view> f;
  while (table.next(f)) {
    const long line = table.line();
    Quote q;
    q.ts = parse_ts(f[c_ts], schema.ts, line);
    q.product = std::string(f[c_product]);
    q.spread = parse_real(f[c_spread], schema.spread, line);
    if (auto v = validate(q)) rethrow_with_line(*v, line);
    result.records.push_back(std::move(q));
  }
  if (result.records.empty()) throw Error(ErrorCode::kEmptyFile, "no quote rows");
  sort_records(result);
  return result;
}

ParseResult<Quote> parse_quotes(const std::filesystem::path& path, const QuoteSchema& schema) {
  auto in = open(path);
  return parse_quotes(in, schema);
}

RebasedSeries rebase(std::span<const Quote> quotes) {
  if (quotes.empty()) throw Error(ErrorCode::kEmptyInput, "rebase needs at least one quote");
  RebasedSeries series;
  series.product = quotes.front().product;
  double sum = 0.0;
  for (const auto& q : quotes) sum += q.spread;
  series.mean_spread = sum / static_cast<double>(quotes.size());
  series.points.reserve(quotes.size());
  for (const auto& q : quotes) {
    series.points.push_back({q.ts, kRebaseLevel * q.spread / series.mean_spread});
  }
  std::stable_sort(series.points.begin(), series.points.end(),
                   [](const RebasedPoint& a, const RebasedPoint& b) { return a.ts < b.ts; });
  return series;
}

std::optional<std::size_t> prevailing_index(Timestamp trade_ts, const RebasedSeries& series) {
  const auto& pts = series.points;
  auto it = std::lower_bound(pts.begin(), pts.end(), trade_ts,
                             [](const RebasedPoint& p, Timestamp ts) { return p.ts < ts; });
  if (it == pts.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(pts.begin(), it) - 1);
}

double prevailing_mid(Timestamp trade_ts, const RebasedSeries& series) {
  if (series.points.empty()) throw Error(ErrorCode::kEmptyInput, "empty quote series");
  auto idx = prevailing_index(trade_ts, series);
  if (!idx) {
    throw Error(ErrorCode::kNoPriorQuote,
                "no quote before ts " + std::to_string(trade_ts), "ts");
  }
  return series.points[*idx].m;
}

std::optional<double> mid_at_or_before(Timestamp ts, const RebasedSeries& series) {
  const auto& pts = series.points;
  auto it = std::upper_bound(pts.begin(), pts.end(), ts,
                             [](Timestamp t, const RebasedPoint& p) { return t < p.ts; });
  if (it == pts.begin()) return std::nullopt;
  return std::prev(it)->m;
}

Tape make_tape(std::vector<Trade> trades, std::span<const Quote> quotes) {
  if (trades.empty()) throw Error(ErrorCode::kEmptyInput, "tape has no trades");
  Tape tape;
  tape.product = trades.front().product;
  for (const auto& t : trades) {
    if (t.product != tape.product) {
      throw Error(ErrorCode::kMixedProducts,
                  "trades mix products '" + tape.product + "' and '" + t.product + "'",
                  "product");
    }
  }
  for (const auto& q : quotes) {
    if (q.product != tape.product) {
      throw Error(ErrorCode::kMixedProducts,
                  "quote product '" + q.product + "' differs from trades '" + tape.product + "'",
                  "product");
    }
  }
  std::stable_sort(trades.begin(), trades.end(),
                   [](const Trade& a, const Trade& b) { return a.ts < b.ts; });
  tape.trades = std::move(trades);
  tape.rebased = rebase(quotes);
  return tape;
}

Tape load_tape(const std::filesystem::path& trades_csv, const std::filesystem::path& quotes_csv) {
  auto trades = parse_trades(trades_csv);
  auto quotes = parse_quotes(quotes_csv);
  return make_tape(std::move(trades.records), quotes.records);
}

}  // namespace otcimpact
