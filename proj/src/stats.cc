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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nemaudit/error.h"
#include "nemaudit/io.h"

namespace nemaudit {
namespace {

double ContinuedFraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  return h;
}

TTestResult FromDifferences(std::span<const double> diffs, double variance_scale) {
  TTestResult result;
  result.df = static_cast<int>(diffs.size()) - 1;
  result.mean_difference = Mean(diffs);
  result.variance = SampleVariance(diffs);
  const bool all_equal = std::all_of(diffs.begin(), diffs.end(),
                                     [&](double d) { return d == diffs[0]; });
  if (all_equal || !(result.variance > 0.0)) {
    result.degenerate = true;
    result.variance = 0.0;
    if (all_equal) result.mean_difference = diffs[0];
    result.note =
        "all differences equal " + FormatDouble(result.mean_difference);
    return result;
  }
  const double t =
      result.mean_difference / std::sqrt(variance_scale * result.variance);
  result.t = t;
  result.p = TTailProbability(t, result.df);
  return result;
}

}  // namespace

void ConfusionCounts::Add(int label, int prediction) {
  if (label == 1) {
    (prediction == 1 ? tp : fn) += 1;
  } else {
    (prediction == 1 ? fp : tn) += 1;
  }
}

Metrics ComputeMetrics(const ConfusionCounts& c) {
  Metrics m;
  if (c.total() > 0) {
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  }
  if (c.tp + c.fp > 0) {
    m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0) {
    m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  }
  return m;
}

double Auc(std::span<const ScoredLabel> scores) {
  std::vector<ScoredLabel> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
  // Sum over positives of (#negatives strictly below + half the tied ones).
  double wins = 0.0;
  std::int64_t negatives_below = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::int64_t tie_pos = 0;
    std::int64_t tie_neg = 0;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      (sorted[j].label == 1 ? tie_pos : tie_neg) += 1;
      ++j;
    }
    wins += static_cast<double>(tie_pos) *
            (static_cast<double>(negatives_below) + 0.5 * static_cast<double>(tie_neg));
    negatives_below += tie_neg;
    positives += tie_pos;
    negatives += tie_neg;
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    throw ValidationError("AUC needs at least one positive and one negative");
  }
  return wins / (static_cast<double>(positives) * static_cast<double>(negatives));
}

double FalsePositiveRate(std::span<const int> predictions) {
  if (predictions.empty()) throw ValidationError("FPR of an empty set");
  const auto positives = std::count(predictions.begin(), predictions.end(), 1);
  return static_cast<double>(positives) / static_cast<double>(predictions.size());
}

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * ContinuedFraction(x, a, b) / a;
  }
  return 1.0 - front * ContinuedFraction(1.0 - x, b, a) / b;
}

double TTailProbability(double t, double df) {
  if (!(df >= 1.0)) throw ValidationError("t tail needs df >= 1");
  if (std::isnan(t)) throw ValidationError("t is NaN");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(RegularizedIncompleteBeta(x, 0.5 * df, 0.5), 0.0, 1.0);
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double SampleVariance(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("variance needs >= 2 values");
  const double mean = Mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(values.size() - 1);
}

TTestResult CorrectedResampledTTest(std::span<const double> differences, int k,
                                    int r, double n_train, double n_test) {
  if (k < 2 || r < 1) throw ValidationError("corrected t-test needs k >= 2, r >= 1");
  if (differences.size() != static_cast<std::size_t>(k) * r) {
    throw ValidationError("corrected t-test expects k*r = " +
                          std::to_string(k * r) + " differences, got " +
                          std::to_string(differences.size()));
  }
  if (!(n_train > 0.0 && n_test > 0.0)) {
    throw ValidationError("corrected t-test needs positive fold sizes");
  }
  const double scale = 1.0 / static_cast<double>(k * r) + n_test / n_train;
  return FromDifferences(differences, scale);
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("paired t-test: length mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw ValidationError("paired t-test needs >= 2 pairs");
  std::vector<double> diffs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  return FromDifferences(diffs, 1.0 / static_cast<double>(diffs.size()));
}

}  // namespace nemaudit
