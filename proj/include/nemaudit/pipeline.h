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

#ifndef NEMAUDIT_PIPELINE_H_
#define NEMAUDIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nemaudit/corpus.h"
#include "nemaudit/embed.h"
#include "nemaudit/eval.h"
#include "nemaudit/model.h"
#include "nemaudit/nermask.h"
#include "nemaudit/preprocess.h"
#include "nemaudit/tokenizer.h"

namespace nemaudit {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kDeterministicTest;
  int dim = kDefaultEmbeddingDim;
  std::uint64_t seed = 0;
  std::string identity;
  // PrecomputedStore source file.
  std::string store;
  // ExternalProcess argv.
  std::vector<std::string> command;
};

struct CorpusConfig {
  std::vector<std::string> bot_markers = {"bot"};
  std::vector<FlairRule> flair_rules;
};

// The whole run in one document; every stage reads the same file.
struct PipelineConfig {
  std::uint64_t master_seed = 0;
  CorpusConfig corpus;
  PreprocessConfig preprocess;
  TokenizerConfig tokenizer;
  // Optional vocabulary; when set, embed reports sequence truncation.
  std::string vocab;
  FneConfig fne;
  TrainConfig train;
  CvConfig cv;
  ProviderConfig provider;

  void Validate() const;
};

// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
PipelineConfig ParsePipelineConfig(std::string_view content);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);
nlohmann::json PipelineConfigToJson(const PipelineConfig& config);

// Relative paths inside the config resolve against `base_dir`.
std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig& config,
                                                const std::filesystem::path& base_dir);
std::string ProviderIdentity(const ProviderConfig& config);

struct RunManifest {
  std::string stage;
  // Paths relative to the manifest's directory mapped to SHA-256 digests.
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  nlohmann::json records = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t master_seed = 0;
  std::string tool_version = std::string(kToolVersion);

  nlohmann::json ToJson() const;
  static RunManifest FromJson(const nlohmann::json& obj);
};

std::filesystem::path ManifestPathFor(const std::filesystem::path& first_output);

// Builds a manifest over the given files, digesting each.
RunManifest MakeManifest(std::string stage, const std::filesystem::path& manifest_path,
                         const std::vector<std::filesystem::path>& inputs,
                         const std::vector<std::filesystem::path>& outputs,
                         const nlohmann::json& config, std::uint64_t master_seed);

void WriteManifest(const std::filesystem::path& path, const RunManifest& manifest);
std::optional<RunManifest> ReadManifest(const std::filesystem::path& path);

// True when an existing manifest at `path` records the same stage, config,
// input digests, and outputs that still match their recorded digests.
bool ManifestUpToDate(const std::filesystem::path& path, const std::string& stage,
                      const std::vector<std::filesystem::path>& inputs,
                      const nlohmann::json& config);

struct VerifyResult {
  std::vector<std::string> verified;
  std::vector<std::string> unrecorded;
};

// Checks every input against the manifests in its directory that list it
// as an output. Throws a ValidationError on a digest mismatch.
VerifyResult VerifyInputs(const std::vector<std::filesystem::path>& inputs);

// Sentences grouped for the Type I error evaluation: L1Ru, L1En and their
// frequent-entity subsets, drawn from Evaluation sentences.
std::map<std::string, std::vector<SentenceRecord>> EvaluationGroups(
    std::span<const SentenceRecord> sentences, const FneList& fne);

}  // namespace nemaudit

#endif  // NEMAUDIT_PIPELINE_H_
