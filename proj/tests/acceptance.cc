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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "nemaudit/entity_label.h"
#include "nemaudit/io.h"
#include "nemaudit/model.h"
#include "nemaudit/nermask.h"
#include "nemaudit/stats.h"
#include "nemaudit/tokenizer.h"
#include "nemaudit/utf8.h"
#include "oracles.h"
#include "pipeline_runner.h"

namespace nemaudit {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// Tolerances and limits.
constexpr double kAucTolerance = 1e-12;
constexpr double kAucSeconds = 5.0;
constexpr double kCorrectedT = 2.3238;
constexpr double kCorrectedTTolerance = 1e-4;
constexpr double kPairedT = 4.0;
constexpr double kPairedTTolerance = 1e-9;
constexpr int kPairedDf = 2;
constexpr double kPairedP = 0.0572;
constexpr double kPairedPTolerance = 1e-4;
constexpr std::size_t kMaxSeqLen = 128;
constexpr double kGradientRelError = 1e-5;
constexpr int kBiasSeeds = 10;
constexpr int kBiasSeedsRequired = 9;
constexpr double kBiasSeconds = 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

Outcome AucOracle() {
  std::mt19937_64 gen(1);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = 2 + gen() % 199;
    std::vector<ScoredLabel> scores(n);
    std::vector<std::pair<double, int>> pairs(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse scores so ties are common.
      const double s = static_cast<double>(gen() % 20) / 19.0;
      const int label = i < 2 ? static_cast<int>(i) : static_cast<int>(gen() % 2);
      scores[i] = {s, label};
      pairs[i] = {s, label};
    }
    worst = std::max(worst, std::fabs(Auc(scores) - oracle::BruteForceAuc(pairs)));
  }
  const double elapsed = Seconds(start);
  return {worst <= kAucTolerance && elapsed < kAucSeconds,
          Fmt("max |auc - brute force| = %.3g over 1000 instances, %.2f s", worst, elapsed)};
}

Outcome TTests() {
  const std::vector<double> diffs = {0.1, 0.2, 0.1, 0.2};
  const TTestResult corrected = CorrectedResampledTTest(diffs, 2, 2, 100.0, 100.0);
  const std::vector<double> a = {1, 2, 3}, b = {0, 1, 1};
  const TTestResult paired = PairedTTest(a, b);
  // Closed-form two-tailed p for df = 2.
  const double closed_p = 1.0 - kPairedT / std::sqrt(kPairedT * kPairedT + 2.0);
  const bool ok = corrected.t && std::fabs(*corrected.t - kCorrectedT) <= kCorrectedTTolerance &&
                  paired.t && std::fabs(*paired.t - kPairedT) <= kPairedTTolerance &&
                  paired.df == kPairedDf && paired.p &&
                  std::fabs(*paired.p - kPairedP) <= kPairedPTolerance &&
                  std::fabs(*paired.p - closed_p) <= 1e-9;
  return {ok, Fmt("corrected t = %.6f; paired t = %.9f, p = %.6f", corrected.t.value_or(NAN),
                  paired.t.value_or(NAN), paired.p.value_or(NAN)) +
                  ", df = " + std::to_string(paired.df)};
}

Outcome TokenizerExactness() {
  const std::string data = NEMAUDIT_TESTDATA;
  const Vocab toy = Vocab::Load(data + "/toy_vocab.txt");
  int golden = 0, golden_ok = 0;
  for (const std::string& line : SplitLines(ReadFile(data + "/wordpiece_golden.tsv"))) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = SplitOn(line, '\t');
    std::vector<std::string> expected;
    for (auto piece : SplitOn(fields.at(1), ' ')) expected.emplace_back(piece);
    ++golden;
    golden_ok += WordPiece(fields[0], toy, 100) == expected;
  }

  // The greedy oracle on random vocabularies over a small alphabet.
  std::mt19937_64 gen(2);
  auto word = [&](std::size_t max_len) {
    std::string w(1 + gen() % max_len, 'a');
    for (char& c : w) c = static_cast<char>('a' + gen() % 4);
    return w;
  };
  int oracle_total = 0, oracle_ok = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::unordered_set<std::string> entries;
    std::vector<std::string> tokens = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    for (int i = 0; i < 12; ++i) {
      std::string piece = word(3);
      if (gen() % 2) piece = "##" + piece;
      if (entries.insert(piece).second) tokens.push_back(piece);
    }
    const Vocab vocab = Vocab::FromTokens(tokens);
    for (int w = 0; w < 50; ++w) {
      const std::string text = word(8);
      ++oracle_total;
      oracle_ok += WordPiece(text, vocab, 100) == oracle::GreedySegment(text, entries, "[UNK]");
    }
  }

  const Tokenizer tok(toy, TokenizerConfig{});
  const std::vector<std::string> atoms = {"a", "b", " ", ",", "hello", "[URL]", "ü", "\xff",
                                          "\t", "ab", "[GPE]", "\xe2\x80\x94", "unaffable"};
  std::size_t longest = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const std::size_t n = gen() % 300;
    for (std::size_t j = 0; j < n; ++j) s += atoms[gen() % atoms.size()];
    longest = std::max(longest, tok.Encode(s).size());
  }
  const bool ok = golden > 0 && golden_ok == golden && oracle_ok == oracle_total &&
                  longest <= kMaxSeqLen;
  return {ok, "golden " + std::to_string(golden_ok) + "/" + std::to_string(golden) +
                  ", oracle " + std::to_string(oracle_ok) + "/" +
                  std::to_string(oracle_total) + ", longest encoding " +
                  std::to_string(longest) + " ids over 10000 strings"};
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\n") - b + 1);
}

Outcome FneCounting() {
  std::mt19937_64 gen(3);
  const std::vector<std::string> surfaces = {"US", "us", " US ", "Trump", "2016", ":D",
                                             "Russia", "russia", "ISIS", "5%", "BTC"};
  const FneConfig config;
  int violations = 0;
  for (int corpus = 0; corpus < 1000; ++corpus) {
    const int comments = 1 + static_cast<int>(gen() % 30);
    std::set<std::string> ids;
    for (int c = 0; c < comments; ++c) ids.insert("c" + std::to_string(c));
    std::vector<EntitySpan> spans;
    const int n = static_cast<int>(gen() % 120);
    for (int i = 0; i < n; ++i) {
      EntitySpan s;
      s.comment_id = "c" + std::to_string(gen() % comments);
      s.surface = surfaces[gen() % surfaces.size()];
      s.label = kAllEntityLabels[gen() % kAllEntityLabels.size()];
      spans.push_back(s);
    }
    std::map<std::pair<std::string, EntityLabel>, std::set<std::string>> expected;
    for (const EntitySpan& s : spans) {
      const std::string folded = utf8::ToLower(Trim(s.surface));
      if (config.excluded_labels.contains(s.label) || folded == ":d") continue;
      expected[{folded, s.label}].insert(s.comment_id);
    }
    const FneList fne = CountFne(spans, ids, config);
    if (fne.size() != expected.size()) ++violations;
    for (const FneEntry& e : fne) {
      const auto it = expected.find({utf8::ToLower(e.surface), e.label});
      if (e.count > comments || config.excluded_labels.contains(e.label) ||
          e.surface == ":D" || it == expected.end() ||
          e.count != static_cast<int>(it->second.size())) {
        ++violations;
      }
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations over 1000 random corpora"};
}

Outcome ClassifierNumerics() {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t dim = 1 + gen() % 32;
    const std::size_t n = 1 + gen() % 20;
    std::vector<std::vector<double>> xs(n, std::vector<double>(dim));
    std::vector<Example> batch;
    for (auto& x : xs) {
      for (double& v : x) v = nd(gen);
    }
    for (std::size_t i = 0; i < n; ++i) batch.push_back({xs[i], static_cast<int>(gen() % 2)});
    std::vector<double> params(dim + 1);
    for (double& p : params) p = 0.5 * nd(gen);
    auto loss = [&](const std::vector<double>& p) {
      return MeanLossAndGradient(std::span(p).first(dim), p[dim], batch).loss;
    };
    const LossGradient g = MeanLossAndGradient(std::span(params).first(dim), params[dim], batch);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i <= dim; ++i) {
      const double analytic = i < dim ? g.grad_weights[i] : g.grad_bias;
      const double numeric = oracle::CentralDifference(loss, params, i, 1e-5);
      diff2 += (analytic - numeric) * (analytic - numeric);
      norm2 += std::max(analytic * analytic, numeric * numeric);
    }
    worst = std::max(worst, std::sqrt(diff2 / std::max(norm2, 1e-300)));
  }

  const std::vector<double> direction = {0.6, -0.8, 0.0, 0.0};
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  while (xs.size() < 200) {
    std::vector<double> v(4);
    for (double& e : v) e = nd(gen);
    double proj = 0.0;
    for (int j = 0; j < 4; ++j) proj += v[j] * direction[j];
    if (std::fabs(proj) < 0.3) continue;
    xs.push_back(v);
    ys.push_back(proj > 0);
  }
  std::vector<Example> ex;
  for (std::size_t i = 0; i < xs.size(); ++i) ex.push_back({xs[i], ys[i]});
  TrainConfig c;
  c.learning_rate = 1.0;
  c.epochs = 200;
  const LinearClassifier m = Train(ex, c);
  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) correct += m.Classify(xs[i], 0.5) == ys[i];
  const double accuracy = correct / static_cast<double>(xs.size());
  return {worst < kGradientRelError && accuracy == 1.0,
          Fmt("max gradient relative error %.3g over 100 instances; separable accuracy %.4f",
              worst, accuracy)};
}

std::map<std::string, std::pair<double, double>> FprRows(const fs::path& report) {
  const json j = json::parse(ReadFile(report));
  std::map<std::string, std::pair<double, double>> out;
  for (const json& row : j.at("type_one_error")) {
    if (row.at("model_a_fpr").is_number() && row.at("model_b_fpr").is_number()) {
      out[row.at("dataset")] = {row.at("model_a_fpr"), row.at("model_b_fpr")};
    }
  }
  return out;
}

Outcome BiasReproduction() {
  const auto start = Clock::now();
  int satisfied = 0;
  std::string failures;
  for (int seed = 1; seed <= kBiasSeeds; ++seed) {
    oracle::TempDir dir;
    const testing::CliResult r = testing::RunPipeline(dir.path(), seed);
    if (r.status != 0) {
      failures += " seed " + std::to_string(seed) + " exit " + std::to_string(r.status);
      continue;
    }
    const auto rows = FprRows(dir / "report.json");
    const bool fne_drop = rows.contains("L1Ru-FNE") &&
                          rows.at("L1Ru-FNE").first > rows.at("L1Ru-FNE").second;
    const bool group_gap = rows.contains("L1Ru") && rows.contains("L1En") &&
                           rows.at("L1Ru").first > rows.at("L1En").first;
    if (fne_drop && group_gap) {
      ++satisfied;
    } else {
      failures += " seed " + std::to_string(seed);
    }
  }
  const double elapsed = Seconds(start);
  return {satisfied >= kBiasSeedsRequired && elapsed < kBiasSeconds,
          std::to_string(satisfied) + "/" + std::to_string(kBiasSeeds) +
              " seeds show both orderings" + Fmt(", %.1f s", elapsed) +
              (failures.empty() ? "" : "; not satisfied:" + failures)};
}

Outcome ReportStructure() {
  // Original corpora and the original encoder are not available here, so
  // absolute values cannot be reproduced. The external provider path runs
  // on generated corpora to check the report shape and the directions.
  oracle::TempDir dir;
  const testing::CliResult r = testing::RunPipeline(dir.path(), 11, {}, [&] {
    json j = json::parse(ReadFile(dir / "config.json"));
    j["provider"] = {{"kind", "ExternalProcess"},
                     {"dim", 768},
                     {"command", {NEMAUDIT_FAKE_SERVER, "768", "ok"}}};
    WriteFile(dir / "config.json", j.dump(2) + "\n");
  });
  if (r.status != 0) return {false, "pipeline failed: " + r.err};
  const json j = json::parse(ReadFile(dir / "report.json"));
  const std::string md = ReadFile(dir / "report.md");
  int missing = 0;
  std::map<std::string, json> metrics;
  for (const json& row : j.at("classification")) metrics[row.at("metric")] = row;
  for (const char* m : {"Accuracy", "AUC", "F1", "Precision", "Recall"}) {
    if (!metrics.contains(m) || !metrics[m].at("model_a").is_number() ||
        !metrics[m].at("model_b").is_number() || !metrics[m].contains("corrected_t")) {
      ++missing;
    }
    if (md.find(std::string("| ") + m + " |") == std::string::npos) ++missing;
  }
  const auto rows = FprRows(dir / "report.json");
  for (const char* g : {"L1Ru", "L1En", "L1Ru-FNE", "L1En-FNE"}) {
    if (!rows.contains(g)) ++missing;
    if (md.find(std::string("| ") + g + " |") == std::string::npos) ++missing;
  }
  if (missing > 0) return {false, std::to_string(missing) + " report cells missing"};
  const double acc_a = metrics["Accuracy"].at("model_a");
  const double acc_b = metrics["Accuracy"].at("model_b");
  const bool directions = acc_a >= acc_b && rows.at("L1Ru-FNE").second < rows.at("L1Ru-FNE").first &&
                          rows.at("L1En-FNE").second < rows.at("L1En-FNE").first;
  return {directions,
          Fmt("full table structure present; accuracy %.4f vs %.4f, ", acc_a, acc_b) +
              Fmt("FNE FPR unmasked/masked %.4f/%.4f (L1Ru), ", rows.at("L1Ru-FNE").first,
                  rows.at("L1Ru-FNE").second) +
              Fmt("%.4f/%.4f (L1En); absolute published values need the original corpora "
                  "and encoder and are not reproduced",
                  rows.at("L1En-FNE").first, rows.at("L1En-FNE").second)};
}

Outcome Determinism() {
  oracle::TempDir first, second;
  const auto a = testing::RunPipeline(first.path(), 1);
  const auto b = testing::RunPipeline(second.path(), 1);
  if (a.status != 0 || b.status != 0) return {false, "pipeline failed"};
  bool same = true;
  for (const char* f : {"report.json", "report.md", "cv_report.json", "embeddings.emb",
                        "fne.csv", "masked.jsonl"}) {
    same = same && ReadFile(first / f) == ReadFile(second / f);
  }
  return {same, same ? "two independent runs produced byte-identical reports"
                     : "reports differ between runs"};
}

}  // namespace
}  // namespace nemaudit

int main() {
  using nemaudit::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"auc matches brute force", nemaudit::AucOracle},
      {"t-test fixtures", nemaudit::TTests},
      {"tokenizer exactness", nemaudit::TokenizerExactness},
      {"FNE counting properties", nemaudit::FneCounting},
      {"classifier numerics", nemaudit::ClassifierNumerics},
      {"directional bias reproduction", nemaudit::BiasReproduction},
      {"report structure and non-reproducibility", nemaudit::ReportStructure},
      {"determinism", nemaudit::Determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
