#include <gtest/gtest.h>

#include <cmath>

#include "otcimpact/domain.hpp"

using namespace otcimpact;

namespace {

Trade good_trade() {
  Trade t;
  t.ts = 1'000;
  t.product = "X";
  t.spread = 72.5;
  t.notional = 1e7;
  return t;
}

}  // namespace

TEST(Validate, WellFormedTradePasses) { EXPECT_FALSE(validate(good_trade()).has_value()); }

TEST(Validate, NegativeSpreadNamesField) {
  auto t = good_trade();
  t.spread = -3.0;
  auto v = validate(t);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->code, ErrorCode::kNegativeSpread);
  EXPECT_EQ(v->field, "spread");
}

TEST(Validate, ZeroQuoteSpreadRejected) {
  Quote q{10, "X", 0.0};
  auto v = validate(q);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->code, ErrorCode::kNegativeSpread);
}

TEST(Validate, NanSpreadRejected) {
  auto t = good_trade();
  t.spread = std::nan("");
  EXPECT_EQ(validate(t)->code, ErrorCode::kNegativeSpread);
}

TEST(Validate, NonPositiveNotionalRejected) {
  auto t = good_trade();
  t.notional = 0.0;
  auto v = validate(t);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->code, ErrorCode::kNegativeNotional);
  EXPECT_EQ(v->field, "notional");
}

TEST(Validate, MissingTimestampRejected) {
  auto t = good_trade();
  t.ts = kNoTimestamp;
  EXPECT_EQ(validate(t)->code, ErrorCode::kMissingTimestamp);
  Quote q{kNoTimestamp, "X", 10.0};
  EXPECT_EQ(validate(q)->field, "ts");
}

TEST(Validate, EnsureValidThrowsWithCode) {
  auto t = good_trade();
  t.spread = -1.0;
  try {
    ensure_valid(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNegativeSpread);
    EXPECT_EQ(e.field(), "spread");
  }
}

TEST(Venue, ParsesKnownNamesAndDefaultsToUnknown) {
  EXPECT_EQ(parse_venue("ON_SEF"), Venue::kOnSef);
  EXPECT_EQ(parse_venue("off_sef"), Venue::kOffSef);
  EXPECT_EQ(parse_venue(""), Venue::kUnknown);
  EXPECT_FALSE(parse_venue("DARK").has_value());
  EXPECT_EQ(Trade{}.venue, Venue::kUnknown);
  for (auto v : {Venue::kUnknown, Venue::kOnSef, Venue::kOffSef}) {
    EXPECT_EQ(parse_venue(to_string(v)), v);
  }
}

TEST(ErrorCodes, UpperSnakeNames) {
  EXPECT_EQ(to_string(ErrorCode::kNoLabels), "NO_LABELS");
  EXPECT_EQ(to_string(ErrorCode::kSingularSystem), "SINGULAR_SYSTEM");
  EXPECT_EQ(to_string(ErrorCode::kQTooLow), "Q_TOO_LOW");
  EXPECT_EQ(to_string(ErrorCode::kNoPriorQuote), "NO_PRIOR_QUOTE");
}

TEST(FitForm, RoundTripsNames) {
  EXPECT_EQ(parse_fit_form("DECAY"), FitForm::kDecay);
  EXPECT_EQ(parse_fit_form("saturating"), FitForm::kSaturating);
  EXPECT_FALSE(parse_fit_form("power").has_value());
}

TEST(LagCurve, SizedFromMaxLag) {
  LagCurve c(CurveKind::kResponse, 7);
  EXPECT_EQ(c.max_lag(), 7u);
  EXPECT_EQ(c.values.size(), 8u);
  EXPECT_EQ(c.counts.size(), 8u);
}
