// Copyright 2026 The nemaudit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nemaudit/stats.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "nemaudit/error.h"
#include "oracles.h"

namespace nemaudit {
namespace {

TEST(ComputeMetricsTest, HandArithmetic) {
  const Metrics m = ComputeMetrics({3, 1, 2, 4});
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*m.precision, 0.75);
  EXPECT_DOUBLE_EQ(*m.recall, 0.6);
  EXPECT_NEAR(*m.f1, 2.0 / 3.0, 1e-12);
}

TEST(ComputeMetricsTest, PerfectClassifier) {
  const Metrics m = ComputeMetrics({5, 0, 0, 7});
  EXPECT_EQ(*m.accuracy, 1.0);
  EXPECT_EQ(*m.precision, 1.0);
  EXPECT_EQ(*m.recall, 1.0);
  EXPECT_EQ(*m.f1, 1.0);
}

TEST(ComputeMetricsTest, UndefinedPrecisionIsAbsent) {
  const Metrics m = ComputeMetrics({0, 0, 3, 2});
  EXPECT_FALSE(m.precision.has_value());
  EXPECT_EQ(*m.recall, 0.0);
  EXPECT_FALSE(m.f1.has_value());
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.4);
}

TEST(ComputeMetricsTest, EmptyCountsHaveNoAccuracy) {
  EXPECT_FALSE(ComputeMetrics({}).accuracy.has_value());
}

TEST(ComputeMetricsTest, AccuracyPropertyOnRandomCounts) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> d(0, 50);
  for (int trial = 0; trial < 2000; ++trial) {
    ConfusionCounts c{d(gen), d(gen), d(gen), d(gen) + 1};
    const Metrics m = ComputeMetrics(c);
    EXPECT_EQ(*m.accuracy, static_cast<double>(c.tp + c.tn) / c.total());
  }
}

TEST(ConfusionCountsTest, AddRoutesCells) {
  ConfusionCounts c;
  c.Add(1, 1);
  c.Add(1, 0);
  c.Add(0, 1);
  c.Add(0, 0);
  c.Add(0, 0);
  EXPECT_EQ(c.tp, 1);
  EXPECT_EQ(c.fn, 1);
  EXPECT_EQ(c.fp, 1);
  EXPECT_EQ(c.tn, 2);
}

TEST(AucTest, Examples) {
  const std::vector<ScoredLabel> separated = {{0.9, 1}, {0.8, 1}, {0.7, 0}, {0.1, 0}};
  EXPECT_EQ(Auc(separated), 1.0);
  const std::vector<ScoredLabel> tie = {{0.5, 1}, {0.5, 0}};
  EXPECT_EQ(Auc(tie), 0.5);
  const std::vector<ScoredLabel> mixed = {{0.9, 1}, {0.4, 1}, {0.6, 0}, {0.2, 0}};
  EXPECT_EQ(Auc(mixed), 0.75);
}

TEST(AucTest, SingleClassThrows) {
  const std::vector<ScoredLabel> pos = {{0.1, 1}, {0.2, 1}};
  EXPECT_THROW(Auc(pos), Error);
  EXPECT_THROW(Auc(std::vector<ScoredLabel>{}), Error);
}

TEST(AucTest, MatchesBruteForceWithTies) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 199);
    const int levels = 1 + static_cast<int>(gen() % 20);
    std::vector<ScoredLabel> scores;
    std::vector<std::pair<double, int>> plain;
    for (int i = 0; i < n; ++i) {
      const double s = static_cast<double>(gen() % levels) / levels;
      const int label = i == 0 ? 1 : (i == 1 ? 0 : static_cast<int>(gen() % 2));
      scores.push_back({s, label});
      plain.emplace_back(s, label);
    }
    EXPECT_NEAR(Auc(scores), oracle::BruteForceAuc(plain), 1e-12);
  }
}

TEST(FalsePositiveRateTest, Proportions) {
  EXPECT_EQ(FalsePositiveRate(std::vector<int>{1, 0, 0, 1}), 0.5);
  EXPECT_EQ(FalsePositiveRate(std::vector<int>{0, 0, 0}), 0.0);
  EXPECT_THROW(FalsePositiveRate(std::vector<int>{}), Error);
}

TEST(TTailProbabilityTest, ZeroGivesOne) {
  for (double df : {1.0, 2.0, 9.0, 99.0}) EXPECT_DOUBLE_EQ(TTailProbability(0.0, df), 1.0);
}

TEST(TTailProbabilityTest, CriticalValueDf9) {
  EXPECT_NEAR(TTailProbability(2.262, 9), 0.05, 1e-3);
  EXPECT_NEAR(TTailProbability(2.262, 9), oracle::TwoTailedP(2.262, 9), 1e-8);
}

TEST(TTailProbabilityTest, ClosedFormsDf1AndDf2) {
  for (double t = 0.0; t < 40.0; t += 0.37) {
    EXPECT_NEAR(TTailProbability(t, 1), 1.0 - 2.0 / M_PI * std::atan(t), 1e-12) << t;
    EXPECT_NEAR(TTailProbability(t, 2), 1.0 - t / std::sqrt(2.0 + t * t), 1e-12) << t;
  }
  EXPECT_NEAR(TTailProbability(4.0, 2), 0.0572, 1e-4);
}

TEST(TTailProbabilityTest, MatchesNumericIntegration) {
  for (double df : {1.0, 2.0, 3.0, 5.0, 9.0, 17.0, 30.0, 99.0}) {
    for (double t : {0.1, 0.5, 1.0, 1.96, 2.5, 4.0, 7.5}) {
      EXPECT_NEAR(TTailProbability(t, df), oracle::TwoTailedP(t, df), 1e-8)
          << "t=" << t << " df=" << df;
      EXPECT_DOUBLE_EQ(TTailProbability(-t, df), TTailProbability(t, df));
    }
  }
}

TEST(TTailProbabilityTest, Limits) {
  EXPECT_EQ(TTailProbability(INFINITY, 5), 0.0);
  EXPECT_GT(TTailProbability(50.0, 99), 0.0);
  EXPECT_THROW(TTailProbability(1.0, 0.5), Error);
  EXPECT_THROW(TTailProbability(NAN, 3), Error);
}

TEST(IncompleteBetaTest, MatchesIntegration) {
  for (double a : {1.0, 1.5, 2.0, 4.5, 10.0}) {
    for (double b : {1.0, 2.5, 6.0}) {
      for (double x : {0.05, 0.3, 0.5, 0.77, 0.95}) {
        EXPECT_NEAR(RegularizedIncompleteBeta(x, a, b), oracle::IncompleteBeta(x, a, b),
                    1e-9)
            << a << " " << b << " " << x;
      }
    }
  }
  EXPECT_EQ(RegularizedIncompleteBeta(0.0, 2, 3), 0.0);
  EXPECT_EQ(RegularizedIncompleteBeta(1.0, 2, 3), 1.0);
  EXPECT_THROW(RegularizedIncompleteBeta(0.5, 0.0, 1.0), Error);
}

TEST(CorrectedResampledTTest, HandEvaluatedFixture) {
  const std::vector<double> d = {0.1, 0.2, 0.1, 0.2};
  const TTestResult r = CorrectedResampledTTest(d, 2, 2, 10, 10);
  // d = 0.15, s2 = 0.01/3, t = d / sqrt((1/4 + 1) s2).
  const double expected = 0.15 / std::sqrt(1.25 * (0.01 / 3.0));
  ASSERT_TRUE(r.t.has_value());
  EXPECT_NEAR(*r.t, expected, 1e-12);
  EXPECT_NEAR(*r.t, 2.3238, 1e-4);
  EXPECT_EQ(r.df, 3);
  EXPECT_NEAR(r.mean_difference, 0.15, 1e-15);
  EXPECT_NEAR(r.variance, 0.01 / 3.0, 1e-15);
  EXPECT_NEAR(*r.p, oracle::TwoTailedP(expected, 3), 1e-8);
  EXPECT_FALSE(r.degenerate);
}

TEST(CorrectedResampledTTest, ZeroVarianceIsDegenerate) {
  const std::vector<double> zeros(4, 0.0);
  const TTestResult r = CorrectedResampledTTest(zeros, 2, 2, 10, 10);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.t.has_value());
  EXPECT_FALSE(r.p.has_value());
  EXPECT_EQ(r.note, "all differences equal 0");

  const std::vector<double> same(6, 0.1);
  const TTestResult s = CorrectedResampledTTest(same, 3, 2, 20, 10);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.note, "all differences equal 0.1");
}

TEST(CorrectedResampledTTest, RejectsBadShapes) {
  const std::vector<double> d = {0.1, 0.2, 0.3};
  EXPECT_THROW(CorrectedResampledTTest(d, 2, 2, 10, 10), Error);
  const std::vector<double> e = {0.1, 0.2, 0.3, 0.4};
  EXPECT_THROW(CorrectedResampledTTest(e, 2, 2, 0, 10), Error);
  EXPECT_THROW(CorrectedResampledTTest(e, 1, 4, 10, 10), Error);
}

TEST(CorrectedResampledTTest, CorrectionShrinksStatistic) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> noise(0.02, 0.05);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + static_cast<int>(gen() % 9);
    const int r = 1 + static_cast<int>(gen() % 10);
    std::vector<double> d(static_cast<std::size_t>(k * r));
    for (double& x : d) x = noise(gen);
    const double n2 = 10.0 + static_cast<double>(gen() % 50);
    const double n1 = n2 * (k - 1);
    const TTestResult c = CorrectedResampledTTest(d, k, r, n1, n2);
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= d.size();
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double uncorrected = mean / std::sqrt(ss / (d.size() - 1) / d.size());
    ASSERT_TRUE(c.t.has_value());
    EXPECT_LT(std::fabs(*c.t), std::fabs(uncorrected));
  }
}

TEST(PairedTTest, HandArithmetic) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {0, 1, 1};
  const TTestResult r = PairedTTest(a, b);
  // Differences 1, 1, 2: mean 4/3, sd 1/sqrt(3), t = (4/3) / (1/3) = 4.
  EXPECT_NEAR(*r.t, 4.0, 1e-9);
  EXPECT_EQ(r.df, 2);
  EXPECT_NEAR(*r.p, 0.0572, 1e-4);
  EXPECT_NEAR(*r.p, 1.0 - 4.0 / std::sqrt(18.0), 1e-12);
}

TEST(PairedTTest, SignAntisymmetry) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(8), b(8);
    for (double& x : a) x = n(gen);
    for (double& x : b) x = n(gen);
    EXPECT_DOUBLE_EQ(*PairedTTest(a, b).t, -*PairedTTest(b, a).t);
    EXPECT_DOUBLE_EQ(*PairedTTest(a, b).p, *PairedTTest(b, a).p);
  }
}

TEST(PairedTTest, DegenerateAndErrors) {
  const std::vector<double> a = {0.3, 0.4, 0.5};
  EXPECT_TRUE(PairedTTest(a, a).degenerate);
  EXPECT_THROW(PairedTTest(a, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(PairedTTest(std::vector<double>{1}, std::vector<double>{2}), Error);
}

TEST(SummaryTest, MeanAndVariance) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(Mean(v), 5.0);
  EXPECT_DOUBLE_EQ(SampleVariance(v), 32.0 / 7.0);
  EXPECT_THROW(Mean(std::vector<double>{}), Error);
  EXPECT_THROW(SampleVariance(std::vector<double>{1.0}), Error);
}

}  // namespace
}  // namespace nemaudit
