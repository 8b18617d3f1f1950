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

#include "nemaudit/eval.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>
#include <utility>

#include "json.hpp"
#include "nemaudit/digest.h"
#include "nemaudit/error.h"
#include "nemaudit/random.h"

namespace nemaudit {
namespace {

using nlohmann::json;

// Stream id reserved for the per-repetition sampling seed.
constexpr std::uint64_t kRepetitionStream = ~0ULL;

FoldScores ScoreFold(const LinearClassifier& model,
                     const std::vector<EmbeddingVector>& features,
                     std::span<const int> labels,
                     std::span<const std::size_t> test, double threshold) {
  ConfusionCounts counts;
  std::vector<ScoredLabel> scored;
  scored.reserve(test.size());
  for (std::size_t i : test) {
    const double p = model.PredictProba(features[i].values);
    counts.Add(labels[i], p >= threshold ? 1 : 0);
    scored.push_back({p, labels[i]});
  }
  const Metrics m = ComputeMetrics(counts);
  FoldScores s;
  s.accuracy = m.accuracy;
  s.precision = m.precision;
  s.recall = m.recall;
  s.f1 = m.f1;
  s.auc = Auc(scored);
  return s;
}

double GroupFpr(const LinearClassifier& model,
                const std::vector<EmbeddingVector>& features, double threshold) {
  std::vector<int> predictions;
  predictions.reserve(features.size());
  for (const EmbeddingVector& v : features) {
    predictions.push_back(model.Classify(v.values, threshold));
  }
  return FalsePositiveRate(predictions);
}

json Optional(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<double> ReadOptional(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

json ScoresToJson(const FoldScores& s) {
  return {{"accuracy", Optional(s.accuracy)}, {"auc", Optional(s.auc)},
          {"f1", Optional(s.f1)},             {"precision", Optional(s.precision)},
          {"recall", Optional(s.recall)}};
}

FoldScores ScoresFromJson(const json& obj) {
  FoldScores s;
  s.accuracy = ReadOptional(obj, "accuracy");
  s.auc = ReadOptional(obj, "auc");
  s.f1 = ReadOptional(obj, "f1");
  s.precision = ReadOptional(obj, "precision");
  s.recall = ReadOptional(obj, "recall");
  return s;
}

constexpr std::string_view kAbsent = "absent";

json TestToJson(const TTestResult& t) {
  json obj = {{"df", t.df},
              {"mean_difference", t.mean_difference},
              {"variance", t.variance},
              {"degenerate", t.degenerate}};
  obj["t"] = t.t ? json(*t.t) : json(kAbsent);
  obj["p"] = t.p ? json(*t.p) : json(kAbsent);
  if (!t.note.empty()) obj["note"] = t.note;
  return obj;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Scientific(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string TCell(const std::optional<TTestResult>& t) {
  if (!t) return std::string(kAbsent);
  if (!t->t) return "degenerate (" + t->note + ")";
  return Fixed(*t->t, 4) + " (df=" + std::to_string(t->df) +
         ", p=" + Scientific(*t->p) + ")";
}

}  // namespace

double FalsePositiveRate(const LinearClassifier& model,
                         std::span<const std::string> negative_sentences,
                         EmbeddingProvider& provider, double threshold) {
  if (negative_sentences.empty()) throw ValidationError("FPR of an empty set");
  const auto vectors = EmbedBatch(provider, negative_sentences);
  std::vector<int> predictions;
  predictions.reserve(vectors.size());
  for (const EmbeddingVector& v : vectors) {
    predictions.push_back(model.Classify(v.values, threshold));
  }
  return FalsePositiveRate(predictions);
}

void CvConfig::Validate() const {
  if (k < 2) throw ValidationError("cv k must be >= 2");
  if (r < 1) throw ValidationError("cv r must be >= 1");
  if (threads < 0) throw ValidationError("cv threads must be >= 0");
}

void CvDataset::Validate() const {
  if (labels.size() != features_a.size() || labels.size() != features_b.size()) {
    throw ValidationError("cv dataset: labels and feature views differ in size");
  }
  for (int l : labels) {
    if (l != 0 && l != 1) throw ValidationError("cv dataset labels must be 0 or 1");
  }
}

ModelBuilder MakeLinearBuilder(TrainConfig config, std::string provider_identity) {
  return [config, identity = std::move(provider_identity)](
             std::span<const Example> train, std::uint64_t seed) {
    TrainConfig c = config;
    c.seed = seed;
    return Train(train, c, identity);
  };
}

std::optional<double> MetricValue(const FoldScores& s, std::string_view name) {
  if (name == "Accuracy") return s.accuracy;
  if (name == "AUC") return s.auc;
  if (name == "F1") return s.f1;
  if (name == "Precision") return s.precision;
  if (name == "Recall") return s.recall;
  throw ValidationError("unknown metric " + std::string(name));
}

std::vector<std::vector<std::size_t>> StratifiedFolds(
    std::span<const int> labels, std::span<const std::size_t> items, int k,
    std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i : items) (labels[i] == 1 ? pos : neg).push_back(i);
  Rng rng(seed);
  rng.Shuffle(&pos);
  rng.Shuffle(&neg);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  // Dealing each class round-robin keeps every fold within one item of the
  // exact class proportion.
  for (std::size_t i = 0; i < pos.size(); ++i) folds[i % k].push_back(pos[i]);
  for (std::size_t i = 0; i < neg.size(); ++i) folds[i % k].push_back(neg[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

CvReport RepeatedKFold(const CvDataset& dataset, const ModelBuilder& build_a,
                       const ModelBuilder& build_b, const CvConfig& config,
                       std::span<const EvalGroup> groups, double threshold) {
  config.Validate();
  dataset.Validate();
  const auto positives = std::count(dataset.labels.begin(), dataset.labels.end(), 1);
  const auto negatives = static_cast<std::int64_t>(dataset.labels.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("cross-validation needs both classes (have " +
                          std::to_string(positives) + " positive, " +
                          std::to_string(negatives) + " negative)");
  }
  const auto smallest = std::min<std::int64_t>(positives, negatives);
  if (config.k > smallest) {
    throw ValidationError("k=" + std::to_string(config.k) +
                          " exceeds the smallest class size " +
                          std::to_string(smallest) +
                          "; lower cv.k or supply more data");
  }
  for (const EvalGroup& g : groups) {
    if (g.features_a.empty() || g.features_a.size() != g.features_b.size()) {
      throw ValidationError("evaluation group " + g.name +
                            " is empty or has mismatched views");
    }
  }

  CvReport report;
  report.k = config.k;
  report.r = config.r;
  report.master_seed = config.master_seed;
  report.threshold = threshold;
  for (const EvalGroup& g : groups) report.group_names.push_back(g.name);

  struct Cell {
    int rep;
    int fold;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
  };
  std::vector<Cell> cells;
  for (int rep = 0; rep < config.r; ++rep) {
    const std::uint64_t rep_seed =
        DeriveSeed(config.master_seed, rep, kRepetitionStream);
    const std::vector<std::size_t> sample = BalancedSample(dataset.labels, rep_seed);
    const auto folds = StratifiedFolds(dataset.labels, sample, config.k, Mix64(rep_seed));
    for (int f = 0; f < config.k; ++f) {
      Cell cell{rep, f, {}, folds[f]};
      for (int g = 0; g < config.k; ++g) {
        if (g != f) cell.train.insert(cell.train.end(), folds[g].begin(), folds[g].end());
      }
      std::sort(cell.train.begin(), cell.train.end());
      cells.push_back(std::move(cell));
    }
  }

  report.folds.resize(cells.size());
  auto run_cell = [&](std::size_t c) {
    const Cell& cell = cells[c];
    const std::uint64_t seed = DeriveSeed(config.master_seed, cell.rep, cell.fold);
    std::vector<Example> train_a;
    std::vector<Example> train_b;
    train_a.reserve(cell.train.size());
    train_b.reserve(cell.train.size());
    for (std::size_t i : cell.train) {
      train_a.push_back({dataset.features_a[i].values, dataset.labels[i]});
      train_b.push_back({dataset.features_b[i].values, dataset.labels[i]});
    }
    const LinearClassifier model_a = build_a(train_a, seed);
    const LinearClassifier model_b = build_b(train_b, seed);
    FoldRecord& rec = report.folds[c];
    rec.repetition = cell.rep;
    rec.fold = cell.fold;
    rec.n_train = static_cast<int>(cell.train.size());
    rec.n_test = static_cast<int>(cell.test.size());
    rec.a = ScoreFold(model_a, dataset.features_a, dataset.labels, cell.test, threshold);
    rec.b = ScoreFold(model_b, dataset.features_b, dataset.labels, cell.test, threshold);
    for (const EvalGroup& g : groups) {
      rec.fpr_a[g.name] = GroupFpr(model_a, g.features_a, threshold);
      rec.fpr_b[g.name] = GroupFpr(model_b, g.features_b, threshold);
    }
  };

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(cells.size()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t c = next++; c < cells.size(); c = next++) run_cell(c);
        } catch (...) {
          errors[w] = std::current_exception();
          next = cells.size();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  ComputeCvStatistics(&report);
  return report;
}

void ComputeCvStatistics(CvReport* report) {
  if (report->folds.size() != static_cast<std::size_t>(report->k) * report->r) {
    throw ValidationError("cv report has " + std::to_string(report->folds.size()) +
                          " folds, expected k*r = " +
                          std::to_string(report->k * report->r));
  }
  double train_total = 0.0;
  double test_total = 0.0;
  for (const FoldRecord& f : report->folds) {
    if (f.n_train <= 0 || f.n_test <= 0) {
      throw ValidationError("cv report has an empty fold");
    }
    train_total += f.n_train;
    test_total += f.n_test;
  }
  const double n = static_cast<double>(report->folds.size());
  report->n_train = train_total / n;
  report->n_test = test_total / n;

  report->metric_tests.clear();
  for (std::string_view name : kMetricNames) {
    std::vector<double> diffs;
    bool complete = true;
    for (const FoldRecord& f : report->folds) {
      const auto a = MetricValue(f.a, name);
      const auto b = MetricValue(f.b, name);
      if (!a || !b) {
        complete = false;
        break;
      }
      diffs.push_back(*a - *b);
    }
    TTestResult t;
    if (!complete) {
      t.degenerate = true;
      t.df = report->k * report->r - 1;
      t.note = "metric undefined on some folds";
    } else {
      t = CorrectedResampledTTest(diffs, report->k, report->r, report->n_train,
                                  report->n_test);
    }
    report->metric_tests[std::string(name)] = t;
  }

  report->fpr_tests.clear();
  for (const std::string& g : report->group_names) {
    std::vector<double> a;
    std::vector<double> b;
    for (const FoldRecord& f : report->folds) {
      a.push_back(f.fpr_a.at(g));
      b.push_back(f.fpr_b.at(g));
    }
    report->fpr_tests[g] = PairedTTest(a, b);
  }
}

double MeanMetric(const CvReport& report, std::string_view name, bool model_a) {
  std::vector<double> values;
  for (const FoldRecord& f : report.folds) {
    if (auto v = MetricValue(model_a ? f.a : f.b, name)) values.push_back(*v);
  }
  if (values.empty()) throw ValidationError("metric " + std::string(name) + " never defined");
  return Mean(values);
}

std::string SerializeCvReport(const CvReport& report) {
  json folds = json::array();
  for (const FoldRecord& f : report.folds) {
    folds.push_back({{"repetition", f.repetition},
                     {"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"a", ScoresToJson(f.a)},
                     {"b", ScoresToJson(f.b)},
                     {"fpr_a", f.fpr_a},
                     {"fpr_b", f.fpr_b}});
  }
  json stats = {{"n_train", report.n_train}, {"n_test", report.n_test}};
  for (const auto& [name, t] : report.metric_tests) {
    stats["corrected_resampled_t"][name] = TestToJson(t);
  }
  for (const auto& [name, t] : report.fpr_tests) {
    stats["paired_fpr_t"][name] = TestToJson(t);
  }
  json obj = {{"format", "nemaudit-cv-report v1"},
              {"k", report.k},
              {"r", report.r},
              {"master_seed", report.master_seed},
              {"threshold", report.threshold},
              {"model_a_name", report.model_a_name},
              {"model_b_name", report.model_b_name},
              {"group_names", report.group_names},
              {"folds", folds},
              {"statistics", stats}};
  return obj.dump(2) + "\n";
}

CvReport ParseCvReport(std::string_view content) {
  json obj = json::parse(content, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    throw ValidationError("cv report is not a JSON object");
  }
  CvReport report;
  try {
    if (obj.at("format").get<std::string>() != "nemaudit-cv-report v1") {
      throw ValidationError("unsupported cv report format");
    }
    report.k = obj.at("k").get<int>();
    report.r = obj.at("r").get<int>();
    report.master_seed = obj.at("master_seed").get<std::uint64_t>();
    report.threshold = obj.at("threshold").get<double>();
    report.model_a_name = obj.at("model_a_name").get<std::string>();
    report.model_b_name = obj.at("model_b_name").get<std::string>();
    report.group_names = obj.at("group_names").get<std::vector<std::string>>();
    for (const json& f : obj.at("folds")) {
      FoldRecord rec;
      rec.repetition = f.at("repetition").get<int>();
      rec.fold = f.at("fold").get<int>();
      rec.n_train = f.at("n_train").get<int>();
      rec.n_test = f.at("n_test").get<int>();
      rec.a = ScoresFromJson(f.at("a"));
      rec.b = ScoresFromJson(f.at("b"));
      rec.fpr_a = f.at("fpr_a").get<std::map<std::string, double>>();
      rec.fpr_b = f.at("fpr_b").get<std::map<std::string, double>>();
      report.folds.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("cv report: ") + e.what());
  }
  ComputeCvStatistics(&report);
  return report;
}

FprTable FprTableFromCv(const CvReport& report) {
  FprTable table;
  for (const std::string& g : report.group_names) {
    std::vector<double> a;
    std::vector<double> b;
    for (const FoldRecord& f : report.folds) {
      a.push_back(f.fpr_a.at(g));
      b.push_back(f.fpr_b.at(g));
    }
    FprRow row;
    row.model_a = Mean(a);
    row.model_b = Mean(b);
    if (auto it = report.fpr_tests.find(g); it != report.fpr_tests.end()) {
      row.test = it->second;
    }
    table[g] = row;
  }
  return table;
}

ReportFiles EmitReport(const CvReport& report, const FprTable& fpr_table) {
  auto value_or_absent = [](const std::optional<double>& v) {
    return v ? json(*v) : json(kAbsent);
  };

  json classification = json::array();
  std::string table;
  table += "## Classification (mean over " + std::to_string(report.k) + "x" +
           std::to_string(report.r) + " folds)\n\n";
  table += "| Metric | " + report.model_a_name + " | " + report.model_b_name +
           " | Corrected t |\n";
  table += "|---|---|---|---|\n";
  for (std::string_view name : kMetricNames) {
    std::optional<double> a;
    std::optional<double> b;
    try {
      a = MeanMetric(report, name, true);
    } catch (const Error&) {
    }
    try {
      b = MeanMetric(report, name, false);
    } catch (const Error&) {
    }
    std::optional<TTestResult> t;
    if (auto it = report.metric_tests.find(std::string(name));
        it != report.metric_tests.end()) {
      t = it->second;
    }
    json row = {{"metric", name},
                {"model_a", value_or_absent(a)},
                {"model_b", value_or_absent(b)}};
    row["corrected_t"] = t ? TestToJson(*t) : json(kAbsent);
    classification.push_back(row);
    table += "| " + std::string(name) + " | " +
             (a ? Fixed(*a, 4) : std::string(kAbsent)) + " | " +
             (b ? Fixed(*b, 4) : std::string(kAbsent)) + " | " + TCell(t) +
             " |\n";
  }

  json type_one = json::array();
  table += "\n## Type I error rates\n\n";
  table += "| Dataset | " + report.model_a_name + " | " + report.model_b_name +
           " | Paired t |\n";
  table += "|---|---|---|---|\n";
  auto percent = [](const std::optional<double>& v) {
    return v ? Fixed(100.0 * *v, 2) + "%" : std::string(kAbsent);
  };
  for (std::string_view name : kFprRows) {
    FprRow row;
    if (auto it = fpr_table.find(std::string(name)); it != fpr_table.end()) {
      row = it->second;
    }
    json jrow = {{"dataset", name},
                 {"model_a_fpr", value_or_absent(row.model_a)},
                 {"model_b_fpr", value_or_absent(row.model_b)}};
    jrow["paired_t"] = row.test ? TestToJson(*row.test) : json(kAbsent);
    type_one.push_back(jrow);
    table += "| " + std::string(name) + " | " + percent(row.model_a) + " | " +
             percent(row.model_b) + " | " + TCell(row.test) + " |\n";
  }

  table += "\nFolds: " + std::to_string(report.folds.size()) +
           ", mean n_train " + Fixed(report.n_train, 1) + ", mean n_test " +
           Fixed(report.n_test, 1) + ", master seed " +
           std::to_string(report.master_seed) + ".\n";

  json doc = {{"format", "nemaudit-report v1"},
              {"model_a", report.model_a_name},
              {"model_b", report.model_b_name},
              {"cross_validation",
               {{"k", report.k},
                {"r", report.r},
                {"folds", report.folds.size()},
                {"n_train", report.n_train},
                {"n_test", report.n_test},
                {"master_seed", report.master_seed},
                {"threshold", report.threshold}}},
              {"classification", classification},
              {"type_one_error", type_one}};
  return {doc.dump(2) + "\n", table};
}

}  // namespace nemaudit
