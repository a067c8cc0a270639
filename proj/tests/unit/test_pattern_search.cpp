#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "turbid/errors.hpp"
#include "turbid/pattern_search.hpp"

using namespace turbid;

namespace {

const std::vector<double> kUnit{1.0, 1.0};
const std::vector<double> kLo{-10.0, -10.0};
const std::vector<double> kHi{10.0, 10.0};

double bowl(std::span<const double> x) {
  return -(x[0] - 1.25) * (x[0] - 1.25) - 2.0 * (x[1] + 0.5) * (x[1] + 0.5);
}

}  // namespace

TEST(PatternSearch, ConvergesOnSeparableBowl) {
  PatternSearchOptions o;
  o.max_iterations = 60;
  const auto r = pattern_search(bowl, {0.0, 0.0}, kUnit, kLo, kHi, o);
  EXPECT_NEAR(r.x[0], 1.25, 2.0 * r.delta);
  EXPECT_NEAR(r.x[1], -0.5, 2.0 * r.delta);
  EXPECT_GE(r.value, r.initial_value);
  EXPECT_EQ(r.iterations, static_cast<int>(r.history.size()));
}

TEST(PatternSearch, HistoryIsNonDecreasing) {
  const auto r = pattern_search(bowl, {-3.0, 4.0}, kUnit, kLo, kHi);
  ASSERT_EQ(r.iterations, 20);
  EXPECT_GE(r.history.front(), r.initial_value);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i], r.history[i - 1]);
}

TEST(PatternSearch, ZeroIterationsKeepsStart) {
  PatternSearchOptions o;
  o.max_iterations = 0;
  const auto r = pattern_search(bowl, {0.3, 0.7}, kUnit, kLo, kHi, o);
  EXPECT_EQ(r.x, (std::vector<double>{0.3, 0.7}));
  EXPECT_EQ(r.evaluations, 1);
  EXPECT_TRUE(r.history.empty());
}

TEST(PatternSearch, StepRule) {
  // From the optimum every poll fails, so delta halves each iteration and
  // each iteration costs 2n evaluations.
  PatternSearchOptions o;
  o.max_iterations = 3;
  const auto r = pattern_search(bowl, {1.25, -0.5}, kUnit, kLo, kHi, o);
  EXPECT_DOUBLE_EQ(r.delta, 0.125);
  EXPECT_EQ(r.evaluations, 1 + 3 * 4);
  // A successful poll keeps delta.
  o.max_iterations = 1;
  const auto s = pattern_search(bowl, {0.25, -0.5}, kUnit, kLo, kHi, o);
  EXPECT_DOUBLE_EQ(s.delta, 1.0);
  EXPECT_DOUBLE_EQ(s.x[0], 1.25);
}

TEST(PatternSearch, TiesGoToLowestPollIndex) {
  auto flat_pair = [](std::span<const double> x) { return std::abs(x[0]) == 1.0 ? 1.0 : 0.0; };
  PatternSearchOptions o;
  o.max_iterations = 1;
  const auto r = pattern_search(flat_pair, {0.0, 0.0}, kUnit, kLo, kHi, o);
  EXPECT_EQ(r.x, (std::vector<double>{1.0, 0.0}));
}

TEST(PatternSearch, BoundsAreNeverEvaluated) {
  int outside = 0;
  auto f = [&](std::span<const double> x) {
    if (x[0] < 0.0 || x[0] > 1.0) ++outside;
    return x[0];
  };
  const std::vector<double> lo{0.0, -1.0}, hi{1.0, 1.0};
  const auto r = pattern_search(f, {0.5, 0.0}, kUnit, lo, hi);
  EXPECT_EQ(outside, 0);
  EXPECT_LE(r.x[0], 1.0);
  EXPECT_GT(r.x[0], 0.99);
}

TEST(PatternSearch, InfeasiblePointsRejected) {
  auto f = [](std::span<const double> x) {
    return x[0] > 0.6 ? -std::numeric_limits<double>::infinity() : x[0];
  };
  const auto r = pattern_search(f, {0.0, 0.0}, kUnit, kLo, kHi);
  EXPECT_LE(r.x[0], 0.6);
  EXPECT_GT(r.x[0], 0.59);
}

TEST(PatternSearch, EvaluationBudgetAndMismatch) {
  PatternSearchOptions o;
  o.max_evaluations = 9;
  const auto r = pattern_search(bowl, {0.0, 0.0}, kUnit, kLo, kHi, o);
  EXPECT_LE(r.evaluations, 9 + 4);
  const std::vector<double> one{1.0};
  EXPECT_THROW(pattern_search(bowl, {0.0, 0.0}, one, kLo, kHi), DataError);
}

TEST(PatternSearch, DiagonalPollAndExpansion) {
  // A narrow diagonal ridge is climbed faster with diagonals.
  auto ridge = [](std::span<const double> x) {
    const double a = x[0] + x[1], b = x[0] - x[1];
    return -(a - 4.0) * (a - 4.0) - 100.0 * b * b;
  };
  PatternSearchOptions plain;
  plain.max_iterations = 10;
  PatternSearchOptions diag = plain;
  diag.diagonal_poll = true;
  diag.expansion = 2.0;
  const auto p = pattern_search(ridge, {0.0, 0.0}, kUnit, kLo, kHi, plain);
  const auto d = pattern_search(ridge, {0.0, 0.0}, kUnit, kLo, kHi, diag);
  EXPECT_GT(d.value, p.value);
  EXPECT_NE(d.variant, p.variant);
}
