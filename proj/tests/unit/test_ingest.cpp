#include <gtest/gtest.h>

#include <cmath>

#include <sstream>

#include "otcimpact/ingest.hpp"

using namespace otcimpact;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

RebasedSeries series(std::vector<std::pair<Timestamp, double>> pts) {
  RebasedSeries s;
  s.mean_spread = 1.0;
  for (auto [ts, m] : pts) s.points.push_back({ts, m});
  return s;
}

}  // namespace

TEST(ParseTrades, WellFormedRowsSorted) {
  std::istringstream in(
      "ts_ns,product,spread_bps,notional,venue,true_sign\n"
      "30,X,72.5,1e7,ON_SEF,1\n"
      "10,X,72.0,2e7,OFF_SEF,\n"
      "20,X,72.25,5e6,,-1\n");
  auto r = parse_trades(in);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[0].ts, 10);
  EXPECT_EQ(r.records[1].ts, 20);
  EXPECT_EQ(r.records[2].ts, 30);
  EXPECT_EQ(r.out_of_order, 1u);
  EXPECT_EQ(r.records[0].venue, Venue::kOffSef);
  EXPECT_FALSE(r.records[0].true_sign.has_value());
  EXPECT_EQ(r.records[1].venue, Venue::kUnknown);
  EXPECT_EQ(*r.records[1].true_sign, -1);
  EXPECT_EQ(r.records[2].id, 0u);  // ids follow input rows
}

TEST(ParseTrades, NonNumericSpreadReportsLine) {
  std::istringstream in(
      "ts_ns,product,spread_bps,notional\n"
      "10,X,72.0,1e7\n"
      "20,X,abc,1e7\n");
  try {
    parse_trades(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.field(), "spread_bps");
  }
}

TEST(ParseTrades, MissingColumnIsSchemaMismatch) {
  std::istringstream in("ts_ns,product,notional\n10,X,1e7\n");
  EXPECT_EQ(code_of([&] { parse_trades(in); }), ErrorCode::kSchemaMismatch);
}

TEST(ParseTrades, CustomSchemaNames) {
  std::istringstream in("time,sym,px,qty\n10,X,72.0,1e7\n");
  TradeSchema schema;
  schema.ts = "time";
  schema.product = "sym";
  schema.spread = "px";
  schema.notional = "qty";
  EXPECT_EQ(parse_trades(in, schema).records.size(), 1u);
}

TEST(ParseTrades, InvalidRecordCarriesLine) {
  std::istringstream in("ts_ns,product,spread_bps,notional\n# meta\n10,X,-2,1e7\n");
  try {
    parse_trades(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeSpread);
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ParseTrades, BlankTimestampIsMissing) {
  std::istringstream in("ts_ns,product,spread_bps,notional\n,X,70,1e7\n");
  EXPECT_EQ(code_of([&] { parse_trades(in); }), ErrorCode::kMissingTimestamp);
}

TEST(ParseQuotes, TwoRows) {
  std::istringstream in("ts_ns,product,spread_bps\n1,X,50\n2,X,51\n");
  EXPECT_EQ(parse_quotes(in).records.size(), 2u);
}

TEST(ParseQuotes, DuplicateTimestampsKeepInputOrder) {
  std::istringstream in("ts_ns,product,spread_bps\n5,X,50\n1,X,49\n5,X,52\n");
  auto r = parse_quotes(in);
  ASSERT_EQ(r.records.size(), 3u);
  EXPECT_EQ(r.records[1].spread, 50);
  EXPECT_EQ(r.records[2].spread, 52);
}

TEST(ParseQuotes, EmptyFile) {
  std::istringstream in("");
  EXPECT_EQ(code_of([&] { parse_quotes(in); }), ErrorCode::kEmptyFile);
  std::istringstream header_only("ts_ns,product,spread_bps\n");
  EXPECT_EQ(code_of([&] { parse_quotes(header_only); }), ErrorCode::kEmptyFile);
}

TEST(ParseQuotes, ByteOrderMarkAndCrlf) {
  std::istringstream in("\xEF\xBB\xBFts_ns,product,spread_bps\r\n1,X,50\r\n");
  auto r = parse_quotes(in);
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].spread, 50.0);
}

TEST(Rebase, ConstantSeries) {
  std::vector<Quote> q{{1, "X", 50}, {2, "X", 50}, {3, "X", 50}};
  auto s = rebase(q);
  for (auto& p : s.points) EXPECT_EQ(p.m, 1e4);
}

TEST(Rebase, DirectFormula) {
  std::vector<Quote> q{{1, "X", 40}, {2, "X", 60}};
  auto s = rebase(q);
  EXPECT_EQ(s.mean_spread, 50.0);
  EXPECT_DOUBLE_EQ(s.points[0].m, 8000.0);
  EXPECT_DOUBLE_EQ(s.points[1].m, 12000.0);
}

TEST(Rebase, SinglePoint) {
  std::vector<Quote> q{{1, "X", 55}};
  EXPECT_EQ(rebase(q).points[0].m, 1e4);
}

TEST(Rebase, EmptyInput) {
  EXPECT_EQ(code_of([] { rebase(std::vector<Quote>{}); }), ErrorCode::kEmptyInput);
}

TEST(Rebase, ScaleInvariantAndMeanIsLevel) {
  std::vector<Quote> q, q2;
  for (int i = 0; i < 50; ++i) {
    const double s = 60.0 + 7.0 * std::sin(0.3 * i);
    q.push_back({i, "X", s});
    q2.push_back({i, "X", 4.0 * s});
  }
  auto a = rebase(q), b = rebase(q2);
  double mean = 0.0;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].m, b.points[i].m);
    mean += a.points[i].m;
  }
  EXPECT_NEAR(mean / 50.0, 1e4, 1e-6 * 1e4);
}

TEST(PrevailingMid, LastStrictlyBefore) {
  auto s = series({{10, 9990}, {20, 10010}});
  EXPECT_EQ(prevailing_mid(15, s), 9990);
  EXPECT_EQ(prevailing_mid(20, s), 9990);
  EXPECT_EQ(prevailing_mid(21, s), 10010);
  EXPECT_EQ(code_of([&] { prevailing_mid(5, s); }), ErrorCode::kNoPriorQuote);
  EXPECT_EQ(code_of([&] { prevailing_mid(10, s); }), ErrorCode::kNoPriorQuote);
}

TEST(PrevailingMid, MonotoneInTradeTime) {
  auto s = series({{10, 1}, {20, 2}, {20, 3}, {35, 4}, {50, 5}});
  std::size_t last = 0;
  for (Timestamp t = 11; t < 70; ++t) {
    auto idx = prevailing_index(t, s);
    ASSERT_TRUE(idx);
    EXPECT_GE(*idx, last);
    EXPECT_LE(s.points[*idx].ts, t - 1);
    last = *idx;
  }
}

TEST(MidAtOrBefore, Inclusive) {
  auto s = series({{10, 1}, {20, 2}});
  EXPECT_FALSE(mid_at_or_before(9, s).has_value());
  EXPECT_EQ(*mid_at_or_before(10, s), 1);
  EXPECT_EQ(*mid_at_or_before(20, s), 2);
}

TEST(MakeTape, MixedProductsRejected) {
  std::vector<Trade> t(1);
  t[0].ts = 5;
  t[0].product = "A";
  t[0].spread = 1;
  t[0].notional = 1;
  std::vector<Quote> q{{1, "B", 50}};
  EXPECT_EQ(code_of([&] { make_tape(t, q); }), ErrorCode::kMixedProducts);
}
