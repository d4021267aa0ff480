#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_match.hpp"
#include "msmsf/edge_eval.hpp"
#include "msmsf/errors.hpp"

namespace msmsf {
namespace {

EdgeProbabilityMap from_binary(const BinaryMap& b, float on = 1.0f) {
  EdgeProbabilityMap m{Plane<float>(b.h, b.w, 0.0f)};
  for (std::size_t i = 0; i < b.size(); ++i) m.values.data[i] = b.data[i] ? on : 0.0f;
  return m;
}

std::size_t ones(const BinaryMap& m) {
  std::size_t n = 0;
  for (auto v : m.data) n += v != 0;
  return n;
}

TEST(Thin, ThickBarBecomesOnePixelWide) {
  BinaryMap bar(9, 20, 0);
  for (std::size_t y = 3; y <= 5; ++y)
    for (std::size_t x = 2; x < 18; ++x) bar.at(y, x) = 1;
  const BinaryMap t = thin(bar);
  for (std::size_t x = 4; x < 16; ++x) {
    std::size_t column = 0;
    for (std::size_t y = 0; y < 9; ++y) column += t.at(y, x);
    EXPECT_EQ(column, 1u) << "x=" << x;
  }
  EXPECT_EQ(thin(t), t);
}

TEST(Thin, PreservesSinglePixelsAndLines) {
  BinaryMap m(7, 7, 0);
  m.at(1, 1) = 1;
  for (std::size_t x = 0; x < 7; ++x) m.at(5, x) = 1;
  EXPECT_EQ(thin(m), m);
}

TEST(Nms, BlurredLinePeaksOnTheCenterRow) {
  EdgeProbabilityMap m{Plane<float>(15, 20, 0.0f)};
  for (std::size_t y = 0; y < 15; ++y)
    for (std::size_t x = 0; x < 20; ++x)
      m.values.at(y, x) = float(std::exp(-0.5 * std::pow((double(y) - 7.0) / 1.5, 2)));
  const EdgeProbabilityMap s = nms(m);
  for (std::size_t x = 3; x < 17; ++x)
    for (std::size_t y = 0; y < 15; ++y) {
      if (y == 7)
        EXPECT_FLOAT_EQ(s.values.at(y, x), m.values.at(y, x));
      else
        EXPECT_EQ(s.values.at(y, x), 0.0f) << y << "," << x;
    }
}

TEST(Nms, FlatPlateauIsSuppressed) {
  const EdgeProbabilityMap flat{Plane<float>(8, 8, 0.4f)};
  for (float v : nms(flat).values.data) EXPECT_EQ(v, 0.0f);
}

TEST(Matching, AgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMap a = testing::isolated_pixels(12, 12, 1 + trial % 6, rng);
    const BinaryMap b = testing::isolated_pixels(12, 12, 1 + (trial / 6) % 6, rng);
    for (double d : {0.5, 1.5, 3.0, 6.0, 20.0})
      EXPECT_EQ(max_matching(a, b, d), testing::brute_force_matching(a, b, d)) << trial << " d=" << d;
  }
}

TEST(Matching, DistanceBoundIsInclusive) {
  BinaryMap a(10, 10, 0), b(10, 10, 0);
  a.at(0, 0) = 1;
  b.at(3, 4) = 1;
  EXPECT_EQ(max_matching(a, b, 5.0), 1u);
  EXPECT_EQ(max_matching(a, b, 4.999), 0u);
}

TEST(Correspond, MonotoneInTolerance) {
  EXPECT_THROW(correspond(BinaryMap(4, 4, 0), {BinaryMap(4, 4, 0)}, 0.0), ConfigError);
  std::mt19937_64 rng(3);
  const BinaryMap pred = testing::isolated_pixels(32, 32, 20, rng);
  const std::vector<BinaryMap> gts{testing::isolated_pixels(32, 32, 20, rng), testing::isolated_pixels(32, 32, 15, rng)};
  std::size_t prev_pred = 0, prev_gt = 0;
  for (double tol : {0.001, 0.01, 0.02, 0.05, 0.1, 0.3, 1.0}) {
    const Correspondence c = correspond(pred, gts, tol);
    EXPECT_GE(c.pred_matched, prev_pred);
    EXPECT_GE(c.gt_matched_sum(), prev_gt);
    EXPECT_LE(c.pred_matched, c.pred_total);
    EXPECT_EQ(ones(c.pred_matched_map), c.pred_matched);
    prev_pred = c.pred_matched;
    prev_gt = c.gt_matched_sum();
  }
  EXPECT_EQ(prev_pred, 20u);
  EXPECT_EQ(prev_gt, 35u);
}

TEST(Counts, RatiosAndZeroDenominators) {
  ThresholdCounts c{0.5, 3, 4, 2, 8};
  EXPECT_DOUBLE_EQ(c.precision(), 0.75);
  EXPECT_DOUBLE_EQ(c.recall(), 0.25);
  EXPECT_DOUBLE_EQ(c.f1(), 2 * 0.75 * 0.25 / 1.0);
  ThresholdCounts z{0.5, 0, 0, 0, 8};
  EXPECT_EQ(z.f1(), 0.0);
}

TEST(Evaluate, GroundTruthAgainstItselfIsPerfect) {
  BinaryMap gt(20, 20, 0);
  for (std::size_t x = 2; x < 18; ++x) gt.at(10, x) = 1;
  for (std::size_t y = 2; y < 10; ++y) gt.at(y, 5) = 1;
  EvalOptions opt;
  opt.apply_nms = false;
  const EvalResult r = evaluate_dataset({from_binary(gt)}, {{gt}}, opt);
  EXPECT_DOUBLE_EQ(r.ods, 1.0);
  EXPECT_DOUBLE_EQ(r.ois, 1.0);
  EXPECT_NEAR(r.ap, 1.0, 1e-12);
}

TEST(Evaluate, OisAtLeastOdsAndHandCase) {
  // Image A is confident, image B only at low thresholds.
  BinaryMap gt(10, 10, 0);
  gt.at(2, 2) = gt.at(6, 6) = 1;
  BinaryMap fa(10, 10, 0);
  fa.at(0, 9) = 1;
  EdgeProbabilityMap a = from_binary(gt, 0.9f);
  a.values.at(0, 9) = 0.3f;
  EdgeProbabilityMap b = from_binary(gt, 0.2f);
  EvalOptions opt;
  opt.apply_nms = false;
  opt.thresholds = {0.1, 0.5};
  opt.tol_frac = 0.01;
  const EvalResult r = evaluate_dataset({a, b}, {{gt}, {gt}}, opt);
  // t=0.1: P 4/5 R 4/4; t=0.5: P 2/2 R 2/4.
  EXPECT_NEAR(r.ods, 2 * 0.8 / 1.8, 1e-12);
  EXPECT_DOUBLE_EQ(r.ods_threshold, 0.1);
  // Per-image best: A at 0.5 (2/2, 2/2), B at 0.1 (2/2, 2/2).
  EXPECT_DOUBLE_EQ(r.ois, 1.0);
  EXPECT_GE(r.ois, r.ods);
}

TEST(Evaluate, OisTiesPreferFewestPredictions) {
  // Image 2 never matches; its best count must be the emptiest threshold.
  std::vector<std::vector<ThresholdCounts>> per{
      {{0.2, 2, 2, 2, 2}, {0.6, 1, 1, 1, 2}},
      {{0.2, 0, 3, 0, 2}, {0.6, 0, 0, 0, 2}},
  };
  const EvalResult r = summarize_counts(per);
  // ODS at 0.2: P 2/5 R 2/4. OIS: P 2/2 R 2/4.
  EXPECT_NEAR(r.ods, 2 * 0.4 * 0.5 / 0.9, 1e-12);
  EXPECT_NEAR(r.ois, 2 * 1.0 * 0.5 / 1.5, 1e-12);
}

TEST(Evaluate, OisIsNotBoundedByOds) {
  // Summing per-image optima can lose to one shared threshold:
  // OIS = 20/23 while ODS = 18/20.
  std::vector<std::vector<ThresholdCounts>> per{
      {{0.2, 1, 3, 1, 1}, {0.6, 0, 0, 0, 1}},
      {{0.2, 9, 20, 9, 10}, {0.6, 9, 9, 9, 10}},
  };
  const EvalResult r = summarize_counts(per);
  EXPECT_NEAR(r.ods, 0.9, 1e-12);
  EXPECT_NEAR(r.ois, 20.0 / 23.0, 1e-12);
  EXPECT_LT(r.ois, r.ods);
}

TEST(Evaluate, RejectsBadThresholdsAndMissingGroundTruth) {
  const BinaryMap gt(4, 4, 0);
  EvalOptions opt;
  opt.thresholds = {0.5, 0.2};
  EXPECT_THROW(evaluate_image(from_binary(gt), {gt}, opt), ConfigError);
  opt.thresholds = {0.0, 0.5};
  EXPECT_THROW(evaluate_image(from_binary(gt), {gt}, opt), ConfigError);
  opt.thresholds = {};
  EXPECT_THROW(evaluate_dataset({from_binary(gt)}, {{gt}}, opt), DataError);
}

TEST(AveragePrecision, TrapezoidWithPrependedPoint) {
  // Points (R, P): (0.5, 1.0), (1.0, 0.5), plus duplicate recall 0.5 at lower P.
  const std::vector<PRPoint> pts{{0.3, 1.0, 0.5, 0.0}, {0.2, 0.5, 1.0, 0.0}, {0.1, 0.4, 0.5, 0.0}};
  // Prepend (0, 1.0): area 0.5*1.0 + 0.5*(1.0+0.5)/2 = 0.875.
  EXPECT_NEAR(average_precision(pts), 0.875, 1e-12);
}

TEST(Thresholds, DefaultSweep) {
  const auto t = default_thresholds();
  ASSERT_EQ(t.size(), 99u);
  EXPECT_DOUBLE_EQ(t.front(), 0.01);
  EXPECT_DOUBLE_EQ(t.back(), 0.99);
}

TEST(PrPlot, DeterministicOutput) {
  PRCurve c{"x", {{0.1, 0.6, 0.9, 0.72}, {0.5, 0.9, 0.4, 0.5538}}};
  EXPECT_EQ(pr_curves_csv({c}), pr_curves_csv({c}));
  EXPECT_EQ(pr_curves_svg({c}), pr_curves_svg({c}));
  EXPECT_EQ(pr_curves_csv({c}).rfind("name,threshold,recall,precision,f1\n", 0), 0u);
  EXPECT_NE(pr_curves_svg({c}).find("<svg"), std::string::npos);
}

}  // namespace
}  // namespace msmsf
