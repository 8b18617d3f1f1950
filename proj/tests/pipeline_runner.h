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

#ifndef NEMAUDIT_TESTS_PIPELINE_RUNNER_H_
#define NEMAUDIT_TESTS_PIPELINE_RUNNER_H_

#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nemaudit/cli.h"

namespace nemaudit::testing {

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

inline CliResult Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nemaudit");
  std::ostringstream out, err;
  const int status = RunCli(args, out, err);
  return {status, out.str(), err.str()};
}

// Runs every stage from synthgen to report in `dir`. `edit_config`, when
// set, may rewrite config.json between synthgen and ingest. Returns the
// first failing stage's result, or the report stage's.
inline CliResult RunPipeline(const std::filesystem::path& dir, std::uint64_t seed,
                             const std::vector<std::string>& synth_flags = {},
                             const std::function<void()>& edit_config = {}) {
  const std::string d = dir.string();
  std::vector<std::string> synth = {"--out-dir", d, "--seed", std::to_string(seed),
                                    "synthgen"};
  synth.insert(synth.end(), synth_flags.begin(), synth_flags.end());
  CliResult r = Cli(synth);
  if (r.status != 0) return r;
  if (edit_config) edit_config();
  auto p = [&](const char* name) { return (dir / name).string(); };
  const std::vector<std::string> common = {"--config", p("config.json"), "--out-dir", d};
  const std::vector<std::vector<std::string>> stages = {
      {"ingest", "--input", p("suspect.jsonl"), "--label", "suspect"},
      {"ingest", "--input", p("random.jsonl"), "--label", "random"},
      {"ingest", "--input", p("evaluation.jsonl"), "--label", "evaluation",
       "--existing-users", p("existing_users.txt")},
      {"preprocess", "--input", p("corpus_suspect.jsonl"), "--input",
       p("corpus_random.jsonl"), "--input", p("corpus_evaluation.jsonl")},
      {"annotate", "--sentences", p("sentences.jsonl"), "--gazetteer", p("gazetteer.tsv")},
      {"mask", "--sentences", p("sentences.jsonl"), "--spans", p("spans.jsonl")},
      {"fne", "--sentences", p("masked.jsonl"), "--spans", p("spans.jsonl"), "--ranked",
       p("fne_full.csv")},
      {"embed", "--sentences", p("masked.jsonl")},
      {"cv", "--sentences", p("masked.jsonl"), "--store", p("embeddings.emb"), "--fne",
       p("fne.csv")},
      {"report", "--cv", p("cv_report.json")},
  };
  for (const auto& stage : stages) {
    std::vector<std::string> args = common;
    args.insert(args.end(), stage.begin(), stage.end());
    r = Cli(args);
    if (r.status != 0) {
      r.err = stage[0] + ": " + r.err;
      return r;
    }
  }
  return r;
}

}  // namespace nemaudit::testing

#endif  // NEMAUDIT_TESTS_PIPELINE_RUNNER_H_
