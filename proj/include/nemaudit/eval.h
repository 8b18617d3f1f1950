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

#ifndef NEMAUDIT_EVAL_H_
#define NEMAUDIT_EVAL_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nemaudit/embed.h"
#include "nemaudit/model.h"
#include "nemaudit/stats.h"

namespace nemaudit {

// Share of negative-only sentences the model flags as positive.
double FalsePositiveRate(const LinearClassifier& model,
                         std::span<const std::string> negative_sentences,
                         EmbeddingProvider& provider, double threshold);

struct CvConfig {
  int k = 10;
  int r = 10;
  std::uint64_t master_seed = 0;
  // Worker threads for independent folds; 0 picks the hardware count.
  // Results do not depend on this value.
  int threads = 0;

  void Validate() const;
};

// Items shared by both models. features_a and features_b hold the two views
// of each item (e.g. unmasked and masked sentence embeddings).
struct CvDataset {
  std::vector<int> labels;
  std::vector<EmbeddingVector> features_a;
  std::vector<EmbeddingVector> features_b;

  void Validate() const;
};

// A negative-only evaluation set scored by every fold's models.
struct EvalGroup {
  std::string name;
  std::vector<EmbeddingVector> features_a;
  std::vector<EmbeddingVector> features_b;
};

using ModelBuilder = std::function<LinearClassifier(
    std::span<const Example> train, std::uint64_t seed)>;

// Builder that runs Train with `config`, substituting the fold seed.
ModelBuilder MakeLinearBuilder(TrainConfig config, std::string provider_identity);

struct FoldScores {
  std::optional<double> accuracy;
  std::optional<double> auc;
  std::optional<double> f1;
  std::optional<double> precision;
  std::optional<double> recall;
};

inline constexpr std::array<std::string_view, 5> kMetricNames = {
    "Accuracy", "AUC", "F1", "Precision", "Recall"};

std::optional<double> MetricValue(const FoldScores& scores, std::string_view name);

struct FoldRecord {
  int repetition = 0;
  int fold = 0;
  int n_train = 0;
  int n_test = 0;
  FoldScores a;
  FoldScores b;
  std::map<std::string, double> fpr_a;
  std::map<std::string, double> fpr_b;
};

struct CvReport {
  int k = 0;
  int r = 0;
  std::uint64_t master_seed = 0;
  double threshold = 0.5;
  std::string model_a_name = "Unmasked Model";
  std::string model_b_name = "Masked Model";
  std::vector<std::string> group_names;
  std::vector<FoldRecord> folds;

  // Filled by ComputeCvStatistics.
  double n_train = 0.0;
  double n_test = 0.0;
  std::map<std::string, TTestResult> metric_tests;
  std::map<std::string, TTestResult> fpr_tests;
};

// Mean train/test sizes, the corrected resampled t-test of every metric's
// per-fold difference (a - b), and the paired t-test of every group's
// per-fold FPRs.
void ComputeCvStatistics(CvReport* report);

// r repetitions of stratified k-fold CV. Each repetition draws a fresh 1:1
// class-balanced sample and a fresh partition; both models see identical
// splits. The (rep, fold) seed is DeriveSeed(master_seed, rep, fold).
CvReport RepeatedKFold(const CvDataset& dataset, const ModelBuilder& build_a,
                       const ModelBuilder& build_b, const CvConfig& config,
                       std::span<const EvalGroup> groups = {},
                       double threshold = 0.5);

// Fold assignment used by RepeatedKFold for one repetition: folds[f] lists
// the item indices tested in fold f.
std::vector<std::vector<std::size_t>> StratifiedFolds(std::span<const int> labels,
                                                      std::span<const std::size_t> items,
                                                      int k, std::uint64_t seed);

double MeanMetric(const CvReport& report, std::string_view name, bool model_a);

std::string SerializeCvReport(const CvReport& report);
// Statistics are recomputed from the folds.
CvReport ParseCvReport(std::string_view content);

inline constexpr std::array<std::string_view, 4> kFprRows = {
    "L1Ru", "L1En", "L1Ru-FNE", "L1En-FNE"};

struct FprRow {
  std::optional<double> model_a;
  std::optional<double> model_b;
  std::optional<TTestResult> test;
};

using FprTable = std::map<std::string, FprRow>;

// Mean per-fold FPR per group with the paired test.
FprTable FprTableFromCv(const CvReport& report);

struct ReportFiles {
  std::string json;
  std::string table;
};

// Machine readable JSON and a markdown rendering of the classification
// table (Accuracy, AUC, F1, Precision, Recall) and the Type I error table
// (L1Ru, L1En, L1Ru-FNE, L1En-FNE). Missing values print as "absent".
ReportFiles EmitReport(const CvReport& report, const FprTable& fpr_table);

}  // namespace nemaudit

#endif  // NEMAUDIT_EVAL_H_
