#include <cmath>

#include <gtest/gtest.h>

#include "koradial/limits.hpp"
#include "koradial/table.hpp"

using namespace koradial;

TEST(FunctionTable, IdentityInverts) {
  FunctionTable t{{0, 1, 2, 3}, {0, 1, 2, 3}};
  const auto inv = invert_table(t);
  EXPECT_EQ(inv.x, t.x);
  EXPECT_EQ(inv.y, t.y);
  EXPECT_DOUBLE_EQ(inv(1.5), 1.5);
}

TEST(FunctionTable, QueryOutsideDomain) {
  FunctionTable t{{0, 1, 2}, {0, 1, 4}};
  const auto inv = invert_table(t);
  try {
    inv(4.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BeyondRange);
  }
}

TEST(FunctionTable, DecreasingTableRejected) {
  try {
    invert_table({{0, 1, 2}, {0, 2, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotStrictlyMonotone);
  }
  EXPECT_THROW(invert_table({{0, 1}, {3, 3}}), Error);
}

TEST(FunctionTable, FlatSpanInvertsToLeftEndpoint) {
  const auto inv = invert_table({{0, 1, 2, 3}, {0, 1, 1, 2}});
  EXPECT_DOUBLE_EQ(inv(1.0), 1.0);
  EXPECT_DOUBLE_EQ(inv(1.5), 2.0);
}

TEST(FunctionTable, RoundTripWithinCell) {
  FunctionTable t{{1.0}, {0.0}};
  append_cumulative(t, 50.0, [](double s) { return 1.0 / (s * s); });
  const auto inv = invert_table(t);
  for (double x = 1.5; x < 45.0; x *= 1.37) {
    EXPECT_LE(std::abs(inv(t(x)) - x), t.cell_width(x));
  }
  EXPECT_NEAR(t(50.0), 1.0 - 1.0 / 50.0, 1e-6);
}

TEST(ClassifyLimit, ConvergentTail) {
  const auto c = classify_limit([](double r) { return 1.0 - 1.0 / r; });
  EXPECT_TRUE(c.finite());
  EXPECT_NEAR(c.estimate, 1.0, 1e-3);
}

TEST(ClassifyLimit, LogarithmicTailDiverges) {
  const auto c = classify_limit([](double r) { return std::log(r); });
  EXPECT_TRUE(c.divergent()) << c.note;
}

TEST(ClassifyLimit, PowerTailDiverges) {
  const auto c = classify_limit([](double r) { return std::sqrt(r); });
  EXPECT_TRUE(c.divergent()) << c.note;
}

TEST(ClassifyLimit, ThresholdStopsEarly) {
  const auto c = classify_limit([](double r) { return r * r * r; });
  EXPECT_TRUE(c.divergent());
  EXPECT_LT(c.evidence.size(), 13u);
}

TEST(ClassifyLimit, ConstantIsFinite) {
  const auto c = classify_limit([](double) { return 3.5; });
  EXPECT_TRUE(c.finite());
  EXPECT_EQ(c.estimate, 3.5);
}

TEST(ClassifyLimit, SlowConvergenceIsInconclusive) {
  // 1 − r^{-0.2} has not settled at r = 4096, and its increments shrink too fast for log growth
  const auto c = classify_limit([](double r) { return 1.0 - std::pow(r, -0.2); });
  EXPECT_TRUE(c.inconclusive()) << c.note;
}

TEST(ClassifyLimit, EvaluationFailureIsInconclusive) {
  const auto c = classify_limit([](double r) -> double {
    if (r > 10) throw Error(Errc::BeyondZRange, "out of range");
    return r;
  });
  EXPECT_TRUE(c.inconclusive());
  EXPECT_NE(c.note.find("BeyondZRange"), std::string::npos);
}
