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

#include "nemaudit/pipeline.h"

#include <algorithm>
#include <set>
#include <system_error>
#include <utility>

#include "nemaudit/digest.h"
#include "nemaudit/entity_label.h"
#include "nemaudit/error.h"
#include "nemaudit/io.h"

namespace nemaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void CheckKeys(const json& obj, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ValidationError("config: " + std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("config: unknown key " + std::string(where) + "." + key);
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T* out) {
  if (auto it = obj.find(key); it != obj.end()) *out = it->get<T>();
}

std::string Relative(const fs::path& file, const fs::path& manifest_dir) {
  std::error_code ec;
  const fs::path abs_file = fs::absolute(file, ec);
  const fs::path abs_dir = fs::absolute(manifest_dir, ec);
  fs::path rel = abs_file.lexically_normal().lexically_relative(abs_dir.lexically_normal());
  if (rel.empty()) rel = abs_file.lexically_normal();
  return rel.generic_string();
}

std::map<std::string, std::string> DigestAll(const std::vector<fs::path>& files,
                                             const fs::path& manifest_dir) {
  std::map<std::string, std::string> out;
  for (const fs::path& f : files) out[Relative(f, manifest_dir)] = Sha256File(f);
  return out;
}

}  // namespace

void PipelineConfig::Validate() const {
  preprocess.Validate();
  tokenizer.Validate();
  fne.Validate();
  train.Validate();
  cv.Validate();
  if (provider.dim < 1) throw ValidationError("config: provider.dim must be >= 1");
  if (provider.kind == ProviderKind::kPrecomputedStore && provider.store.empty()) {
    throw ValidationError("config: provider.store is required for PrecomputedStore");
  }
  if (provider.kind == ProviderKind::kExternalProcess && provider.command.empty()) {
    throw ValidationError("config: provider.command is required for ExternalProcess");
  }
  for (const FlairRule& r : corpus.flair_rules) {
    if (r.pattern.empty()) throw ValidationError("config: empty flair rule pattern");
  }
  for (const std::string& m : corpus.bot_markers) {
    if (m.empty()) throw ValidationError("config: empty bot marker");
  }
}

PipelineConfig ParsePipelineConfig(std::string_view content) {
  json doc = json::parse(content, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("config: not valid JSON");
  PipelineConfig c;
  try {
    CheckKeys(doc, "config",
              {"master_seed", "corpus", "preprocess", "tokenizer", "vocab", "fne",
               "train", "cv", "provider"});
    Read(doc, "master_seed", &c.master_seed);
    Read(doc, "vocab", &c.vocab);
    if (auto it = doc.find("corpus"); it != doc.end()) {
      CheckKeys(*it, "corpus", {"bot_markers", "flair_rules"});
      Read(*it, "bot_markers", &c.corpus.bot_markers);
      if (auto rules = it->find("flair_rules"); rules != it->end()) {
        for (const json& r : *rules) {
          CheckKeys(r, "corpus.flair_rules[]", {"pattern", "group"});
          c.corpus.flair_rules.push_back(
              {r.at("pattern").get<std::string>(),
               ParseL1Group(r.at("group").get<std::string>())});
        }
      }
    }
    if (auto it = doc.find("preprocess"); it != doc.end()) {
      CheckKeys(*it, "preprocess", {"min_sentence_chars", "url_placeholder"});
      Read(*it, "min_sentence_chars", &c.preprocess.min_sentence_chars);
      Read(*it, "url_placeholder", &c.preprocess.url_placeholder);
    }
    if (auto it = doc.find("tokenizer"); it != doc.end()) {
      CheckKeys(*it, "tokenizer", {"max_seq_len", "max_chars_per_word", "lowercase"});
      Read(*it, "max_seq_len", &c.tokenizer.max_seq_len);
      Read(*it, "max_chars_per_word", &c.tokenizer.max_chars_per_word);
      Read(*it, "lowercase", &c.tokenizer.lowercase);
    }
    if (auto it = doc.find("fne"); it != doc.end()) {
      CheckKeys(*it, "fne", {"top_k", "excluded_labels", "excluded_surfaces"});
      Read(*it, "top_k", &c.fne.top_k);
      if (auto l = it->find("excluded_labels"); l != it->end()) {
        c.fne.excluded_labels.clear();
        for (const json& s : *l) {
          c.fne.excluded_labels.insert(ParseEntityLabel(s.get<std::string>()));
        }
      }
      Read(*it, "excluded_surfaces", &c.fne.excluded_surfaces);
    }
    if (auto it = doc.find("train"); it != doc.end()) {
      CheckKeys(*it, "train",
                {"batch_size", "learning_rate", "epochs", "threshold", "shuffle"});
      Read(*it, "batch_size", &c.train.batch_size);
      Read(*it, "learning_rate", &c.train.learning_rate);
      Read(*it, "epochs", &c.train.epochs);
      Read(*it, "threshold", &c.train.threshold);
      Read(*it, "shuffle", &c.train.shuffle);
    }
    if (auto it = doc.find("cv"); it != doc.end()) {
      CheckKeys(*it, "cv", {"k", "r", "threads"});
      Read(*it, "k", &c.cv.k);
      Read(*it, "r", &c.cv.r);
      Read(*it, "threads", &c.cv.threads);
    }
    if (auto it = doc.find("provider"); it != doc.end()) {
      CheckKeys(*it, "provider", {"kind", "dim", "seed", "identity", "store", "command"});
      if (auto k = it->find("kind"); k != it->end()) {
        c.provider.kind = ParseProviderKind(k->get<std::string>());
      }
      Read(*it, "dim", &c.provider.dim);
      Read(*it, "seed", &c.provider.seed);
      Read(*it, "identity", &c.provider.identity);
      Read(*it, "store", &c.provider.store);
      Read(*it, "command", &c.provider.command);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const fs::path& path) {
  return ParsePipelineConfig(ReadFile(path));
}

json PipelineConfigToJson(const PipelineConfig& c) {
  json rules = json::array();
  for (const FlairRule& r : c.corpus.flair_rules) {
    rules.push_back({{"pattern", r.pattern}, {"group", ToString(r.target_group)}});
  }
  json labels = json::array();
  for (EntityLabel l : c.fne.excluded_labels) labels.push_back(ToString(l));
  json provider = {{"kind", ToString(c.provider.kind)},
                   {"dim", c.provider.dim},
                   {"seed", c.provider.seed}};
  if (!c.provider.identity.empty()) provider["identity"] = c.provider.identity;
  if (!c.provider.store.empty()) provider["store"] = c.provider.store;
  if (!c.provider.command.empty()) provider["command"] = c.provider.command;
  json doc = {
      {"master_seed", c.master_seed},
      {"corpus", {{"bot_markers", c.corpus.bot_markers}, {"flair_rules", rules}}},
      {"preprocess",
       {{"min_sentence_chars", c.preprocess.min_sentence_chars},
        {"url_placeholder", c.preprocess.url_placeholder}}},
      {"tokenizer",
       {{"max_seq_len", c.tokenizer.max_seq_len},
        {"max_chars_per_word", c.tokenizer.max_chars_per_word},
        {"lowercase", c.tokenizer.lowercase}}},
      {"fne",
       {{"top_k", c.fne.top_k},
        {"excluded_labels", labels},
        {"excluded_surfaces", c.fne.excluded_surfaces}}},
      {"train",
       {{"batch_size", c.train.batch_size},
        {"learning_rate", c.train.learning_rate},
        {"epochs", c.train.epochs},
        {"threshold", c.train.threshold},
        {"shuffle", c.train.shuffle}}},
      {"cv", {{"k", c.cv.k}, {"r", c.cv.r}, {"threads", c.cv.threads}}},
      {"provider", provider}};
  if (!c.vocab.empty()) doc["vocab"] = c.vocab;
  return doc;
}

std::string ProviderIdentity(const ProviderConfig& config) {
  if (!config.identity.empty()) return config.identity;
  switch (config.kind) {
    case ProviderKind::kDeterministicTest:
      return "deterministic-test:seed=" + std::to_string(config.seed);
    case ProviderKind::kPrecomputedStore:
      return "store:" + config.store;
    case ProviderKind::kExternalProcess: {
      std::string out = "external:";
      for (std::size_t i = 0; i < config.command.size(); ++i) {
        if (i > 0) out += ' ';
        out += config.command[i];
      }
      return out;
    }
  }
  return "";
}

std::unique_ptr<EmbeddingProvider> MakeProvider(const ProviderConfig& config,
                                                const fs::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  switch (config.kind) {
    case ProviderKind::kDeterministicTest:
      return std::make_unique<DeterministicTestEmbedder>(config.seed, config.dim);
    case ProviderKind::kPrecomputedStore: {
      EmbeddingStore store = EmbeddingStore::Load(resolve(config.store));
      if (store.dim() != config.dim) {
        throw ValidationError("store dim " + std::to_string(store.dim()) +
                              " differs from provider.dim " +
                              std::to_string(config.dim));
      }
      return std::make_unique<PrecomputedStoreProvider>(std::move(store),
                                                        ProviderIdentity(config));
    }
    case ProviderKind::kExternalProcess:
      return std::make_unique<ExternalProcessProvider>(config.command, config.dim);
  }
  throw ValidationError("unknown provider kind");
}

json RunManifest::ToJson() const {
  return {{"stage", stage},
          {"inputs", inputs},
          {"outputs", outputs},
          {"records", records},
          {"config", config},
          {"master_seed", master_seed},
          {"tool_version", tool_version}};
}

RunManifest RunManifest::FromJson(const json& obj) {
  RunManifest m;
  try {
    m.stage = obj.at("stage").get<std::string>();
    m.inputs = obj.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = obj.at("outputs").get<std::map<std::string, std::string>>();
    m.records = obj.at("records");
    m.config = obj.at("config");
    m.master_seed = obj.at("master_seed").get<std::uint64_t>();
    m.tool_version = obj.at("tool_version").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

fs::path ManifestPathFor(const fs::path& first_output) {
  fs::path p = first_output;
  p += ".manifest.json";
  return p;
}

RunManifest MakeManifest(std::string stage, const fs::path& manifest_path,
                         const std::vector<fs::path>& inputs,
                         const std::vector<fs::path>& outputs, const json& config,
                         std::uint64_t master_seed) {
  const fs::path dir = manifest_path.parent_path().empty() ? fs::path(".")
                                                           : manifest_path.parent_path();
  RunManifest m;
  m.stage = std::move(stage);
  m.inputs = DigestAll(inputs, dir);
  m.outputs = DigestAll(outputs, dir);
  m.config = config;
  m.master_seed = master_seed;
  return m;
}

void WriteManifest(const fs::path& path, const RunManifest& manifest) {
  WriteFile(path, manifest.ToJson().dump(2) + "\n");
}

std::optional<RunManifest> ReadManifest(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  json obj = json::parse(ReadFile(path), nullptr, false);
  if (obj.is_discarded()) return std::nullopt;
  try {
    return RunManifest::FromJson(obj);
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool ManifestUpToDate(const fs::path& path, const std::string& stage,
                      const std::vector<fs::path>& inputs, const json& config) {
  const auto m = ReadManifest(path);
  if (!m || m->stage != stage || m->config != config ||
      m->tool_version != kToolVersion) {
    return false;
  }
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  for (const fs::path& f : inputs) {
    if (!fs::exists(f, ec)) return false;
  }
  if (DigestAll(inputs, dir) != m->inputs) return false;
  for (const auto& [rel, digest] : m->outputs) {
    const fs::path f = dir / rel;
    if (!fs::exists(f, ec) || Sha256File(f) != digest) return false;
  }
  return true;
}

VerifyResult VerifyInputs(const std::vector<fs::path>& inputs) {
  VerifyResult result;
  for (const fs::path& input : inputs) {
    const fs::path dir = input.parent_path().empty() ? fs::path(".") : input.parent_path();
    const std::string digest = Sha256File(input);
    bool recorded = false;
    std::error_code ec;
    std::vector<fs::path> manifests;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 14 && name.ends_with(".manifest.json")) {
        manifests.push_back(entry.path());
      }
    }
    std::sort(manifests.begin(), manifests.end());
    for (const fs::path& mpath : manifests) {
      const auto m = ReadManifest(mpath);
      if (!m) continue;
      const std::string rel = Relative(input, dir);
      auto it = m->outputs.find(rel);
      if (it == m->outputs.end()) continue;
      recorded = true;
      if (it->second != digest) {
        throw ValidationError("digest mismatch for " + input.string() + ": manifest " +
                              mpath.string() + " records " + it->second +
                              ", file has " + digest);
      }
    }
    (recorded ? result.verified : result.unrecorded).push_back(input.string());
  }
  return result;
}

std::map<std::string, std::vector<SentenceRecord>> EvaluationGroups(
    std::span<const SentenceRecord> sentences, const FneList& fne) {
  std::map<std::string, std::vector<SentenceRecord>> groups;
  std::vector<SentenceRecord>& ru = groups["L1Ru"];
  std::vector<SentenceRecord>& en = groups["L1En"];
  for (const SentenceRecord& s : sentences) {
    if (s.source_label != SourceLabel::kEvaluation || !s.l1_group) continue;
    if (*s.l1_group == L1Group::kRussian) ru.push_back(s);
    if (*s.l1_group == L1Group::kEnglish) en.push_back(s);
  }
  if (!fne.empty()) {
    groups["L1Ru-FNE"] = FilterByFne(ru, fne);
    groups["L1En-FNE"] = FilterByFne(en, fne);
  }
  return groups;
}

}  // namespace nemaudit
