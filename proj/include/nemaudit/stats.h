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

#ifndef NEMAUDIT_STATS_H_
#define NEMAUDIT_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nemaudit {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  void Add(int label, int prediction);
  std::int64_t total() const { return tp + fp + fn + tn; }
};

// Metrics whose denominator is zero are left empty rather than invented.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

Metrics ComputeMetrics(const ConfusionCounts& counts);

struct ScoredLabel {
  double score = 0.0;
  int label = 0;
};

// Mann-Whitney statistic: the probability that a random positive outscores a
// random negative, ties counting one half. O(n log n). Requires both classes.
double Auc(std::span<const ScoredLabel> scores);

// Fraction of predictions equal to 1. Requires a non-empty set.
double FalsePositiveRate(std::span<const int> predictions);

// Two-tailed p = 2 P(T_df >= |t|), via the regularized incomplete beta
// function. Absolute error well below 1e-10 for df >= 1.
double TTailProbability(double t, double df);

// I_x(a, b) by Lentz's continued fraction; a, b > 0 and 0 <= x <= 1.
double RegularizedIncompleteBeta(double x, double a, double b);

struct TTestResult {
  // Unset when the differences have zero variance.
  std::optional<double> t;
  int df = 0;
  std::optional<double> p;
  double mean_difference = 0.0;
  // Unbiased (n - 1) sample variance of the differences.
  double variance = 0.0;
  bool degenerate = false;
  std::string note;
};

// Repeated k-fold CV test with the variance term inflated by n_test/n_train:
//   t = mean / sqrt((1/(k r) + n2/n1) var),  df = k r - 1.
TTestResult CorrectedResampledTTest(std::span<const double> differences, int k,
                                    int r, double n_train, double n_test);

// Student's paired-sample test on a - b; df = n - 1.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

double Mean(std::span<const double> values);
// n - 1 denominator; requires at least two values.
double SampleVariance(std::span<const double> values);

}  // namespace nemaudit

#endif  // NEMAUDIT_STATS_H_
