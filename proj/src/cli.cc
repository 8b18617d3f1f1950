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

#include "nemaudit/cli.h"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nemaudit/corpus.h"
#include "nemaudit/digest.h"
#include "nemaudit/embed.h"
#include "nemaudit/error.h"
#include "nemaudit/eval.h"
#include "nemaudit/io.h"
#include "nemaudit/model.h"
#include "nemaudit/nermask.h"
#include "nemaudit/pipeline.h"
#include "nemaudit/preprocess.h"
#include "nemaudit/synth.h"
#include "nemaudit/tokenizer.h"

namespace nemaudit {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::size_t kEmbedChunk = 512;

struct Context {
  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool verify = false;
  bool strict = false;
  std::string out_dir = ".";

  PipelineConfig config;
  json config_json;
  fs::path base_dir = ".";

  void LoadConfig() {
    if (!config_path.empty()) {
      config = LoadPipelineConfig(config_path);
      base_dir = fs::path(config_path).parent_path();
      if (base_dir.empty()) base_dir = ".";
    }
    if (seed) config.master_seed = *seed;
    config_json = PipelineConfigToJson(config);
  }

  fs::path Out(const std::string& explicit_path, const std::string& name) const {
    return explicit_path.empty() ? fs::path(out_dir) / name : fs::path(explicit_path);
  }
};

// Runs `body` unless the manifest beside the first output shows the stage is
// already up to date. Returns the manifest's record block either way.
json RunStage(Context& ctx, const std::string& stage, const std::vector<fs::path>& inputs,
              const std::vector<fs::path>& outputs, const std::function<json()>& body) {
  for (const fs::path& p : inputs) {
    std::error_code ec;
    if (!fs::exists(p, ec)) throw IoError("missing input " + p.string());
  }
  if (ctx.verify) {
    const VerifyResult v = VerifyInputs(inputs);
    for (const std::string& p : v.unrecorded) {
      ctx.err << stage << ": warning: no manifest records " << p << "\n";
    }
  }
  const fs::path manifest_path = ManifestPathFor(outputs.front());
  if (ManifestUpToDate(manifest_path, stage, inputs, ctx.config_json)) {
    ctx.err << stage << ": up to date, skipped\n";
    return ReadManifest(manifest_path)->records;
  }
  json records = body();
  RunManifest m = MakeManifest(stage, manifest_path, inputs, outputs, ctx.config_json,
                               ctx.config.master_seed);
  m.records = records;
  WriteManifest(manifest_path, m);
  for (const fs::path& p : outputs) ctx.err << stage << ": wrote " << p.string() << "\n";
  return records;
}

std::vector<SentenceRecord> LoadSentences(const fs::path& path) {
  return ParseSentences(ReadFile(path));
}

std::vector<std::string> Texts(std::span<const SentenceRecord> sentences, bool masked) {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const SentenceRecord& s : sentences) {
    if (masked) {
      if (!s.masked_text) {
        throw ValidationError("sentence " + s.comment_id + "#" +
                              std::to_string(s.sentence_index) +
                              " has no masked_text; run the mask stage first");
      }
      out.push_back(*s.masked_text);
    } else {
      out.push_back(s.text);
    }
  }
  return out;
}

std::vector<EmbeddingVector> Embed(EmbeddingProvider& provider,
                                   std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); i += kEmbedChunk) {
    const std::size_t n = std::min(kEmbedChunk, texts.size() - i);
    auto part = EmbedBatch(provider, texts.subspan(i, n));
    for (auto& v : part) out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> StoreProvider(const Context& ctx, const fs::path& store) {
  EmbeddingStore s = EmbeddingStore::Load(store);
  if (s.dim() != ctx.config.provider.dim) {
    throw ValidationError("store " + store.string() + " has dim " +
                          std::to_string(s.dim()) + " but provider.dim is " +
                          std::to_string(ctx.config.provider.dim));
  }
  return std::make_unique<PrecomputedStoreProvider>(std::move(s),
                                                    ProviderIdentity(ctx.config.provider));
}

// Suspect sentences are the positive class, random negatives the negative.
void TrainingSet(std::span<const SentenceRecord> sentences,
                 std::vector<const SentenceRecord*>* items, std::vector<int>* labels) {
  for (const SentenceRecord& s : sentences) {
    if (s.source_label == SourceLabel::kSuspect) {
      items->push_back(&s);
      labels->push_back(1);
    } else if (s.source_label == SourceLabel::kRandomNegative) {
      items->push_back(&s);
      labels->push_back(0);
    }
  }
}

int CountDegenerate(const CvReport& report) {
  int n = 0;
  for (const auto& [name, t] : report.metric_tests) n += t.degenerate ? 1 : 0;
  for (const auto& [name, t] : report.fpr_tests) n += t.degenerate ? 1 : 0;
  return n;
}

int StrictStatus(const Context& ctx, const json& records, const std::string& stage) {
  const int degenerate = records.value("degenerate_tests", 0);
  if (degenerate > 0) {
    ctx.err << stage << ": " << degenerate << " degenerate test(s)\n";
    if (ctx.strict) return static_cast<int>(ErrorKind::kDegenerate);
  }
  return 0;
}

// --- synthgen -------------------------------------------------------------

struct SynthgenCmd {
  SynthConfig synth;

  void Register(CLI::App* app) {
    app->add_option("--suspect", synth.suspect_comments, "Suspect comments");
    app->add_option("--random", synth.random_comments, "Random negative comments");
    app->add_option("--group-a", synth.group_a_comments, "Group A (native) comments");
    app->add_option("--group-b", synth.group_b_comments, "Group B (L1 transfer) comments");
    app->add_option("--rate-pos", synth.entity_rate_pos, "Frequent entity rate, positives");
    app->add_option("--rate-b", synth.entity_rate_group_b, "Frequent entity rate, group B");
    app->add_option("--rate-a", synth.entity_rate_group_a,
                    "Frequent entity rate, group A and random negatives");
    app->add_option("--overlap", synth.style_overlap, "Group B share of transfer style");
  }

  int Run(Context& ctx) {
    synth.seed = ctx.seed.value_or(0);
    const SynthCorpora corpora = GenerateSynthetic(synth);

    PipelineConfig config;
    config.master_seed = synth.seed;
    config.provider.kind = ProviderKind::kDeterministicTest;
    config.provider.seed = synth.seed;
    // The linear layer only sees frozen embeddings, so a larger step is
    // needed to approach the optimum within the default epoch count.
    config.train.learning_rate = 2.0;
    for (const char* p : {"Moscow", "Petersburg", "Russia", "Tatarstan", "Novosibirsk",
                          "Kazan"}) {
      config.corpus.flair_rules.push_back({p, L1Group::kRussian});
    }
    for (const char* p : {"United Kingdom", "USA", "Canada", "Ireland", "Australia",
                          "England"}) {
      config.corpus.flair_rules.push_back({p, L1Group::kEnglish});
    }
    ctx.config = config;
    ctx.config_json = PipelineConfigToJson(config);

    const json synth_json = {{"seed", synth.seed},
                             {"suspect", synth.suspect_comments},
                             {"random", synth.random_comments},
                             {"group_a", synth.group_a_comments},
                             {"group_b", synth.group_b_comments},
                             {"rate_pos", synth.entity_rate_pos},
                             {"rate_b", synth.entity_rate_group_b},
                             {"rate_a", synth.entity_rate_group_a},
                             {"overlap", synth.style_overlap}};
    const fs::path dir(ctx.out_dir);
    const std::vector<fs::path> outputs = {
        dir / "suspect.jsonl",  dir / "random.jsonl",       dir / "evaluation.jsonl",
        dir / "gazetteer.tsv",  dir / "existing_users.txt", dir / "config.json"};
    json snapshot = ctx.config_json;
    snapshot["synth"] = synth_json;
    ctx.config_json = snapshot;
    RunStage(ctx, "synthgen", {}, outputs, [&] {
      WriteFile(outputs[0], SerializeRawRecords(corpora.suspect));
      WriteFile(outputs[1], SerializeRawRecords(corpora.random_negative));
      WriteFile(outputs[2], SerializeRawRecords(corpora.evaluation));
      WriteFile(outputs[3], corpora.gazetteer_tsv);
      std::string users;
      for (const std::string& u : corpora.existing_users) users += u + "\n";
      WriteFile(outputs[4], users);
      WriteFile(outputs[5], PipelineConfigToJson(config).dump(2) + "\n");
      return json{{"suspect", corpora.suspect.size()},
                  {"random", corpora.random_negative.size()},
                  {"evaluation", corpora.evaluation.size()}};
    });
    return 0;
  }
};

// --- ingest ---------------------------------------------------------------

struct IngestCmd {
  std::string input;
  std::string format = "ndjson";
  std::string label;
  std::string output;
  std::string existing_users;

  void Register(CLI::App* app) {
    app->add_option("--input", input, "Raw export file")->required();
    app->add_option("--format", format, "ndjson or csv");
    app->add_option("--label", label, "suspect, random or evaluation")->required();
    app->add_option("--output", output, "Canonical collection file");
    app->add_option("--existing-users", existing_users,
                    "File of author names to drop, one per line");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const SourceLabel source = ParseSourceLabel(label);
    const InputFormat fmt = ParseInputFormat(format);
    const char* stem = source == SourceLabel::kSuspect          ? "suspect"
                       : source == SourceLabel::kRandomNegative ? "random"
                                                                : "evaluation";
    const fs::path out = ctx.Out(output, "corpus_" + std::string(stem) + ".jsonl");
    std::vector<fs::path> inputs = {input};
    if (!existing_users.empty()) inputs.push_back(existing_users);
    RunStage(ctx, "ingest", inputs, {out}, [&] {
      LoadResult loaded = LoadComments(input, fmt, source);
      for (const std::string& w : loaded.warnings) ctx.err << "ingest: warning: " << w << "\n";
      std::set<std::string> existing;
      if (!existing_users.empty()) {
        for (const std::string& line : SplitLines(ReadFile(existing_users))) {
          if (!line.empty() && line[0] != '#') existing.insert(line);
        }
      }
      CommentCollection comments =
          DedupAndFilterUsers(loaded.comments, existing, ctx.config.corpus.bot_markers);
      if (source == SourceLabel::kEvaluation && !ctx.config.corpus.flair_rules.empty()) {
        comments = AssignL1Groups(comments, FlairMapFromComments(comments),
                                  ctx.config.corpus.flair_rules);
      }
      ValidateCollection(comments);
      WriteFile(out, SerializeCollection(comments));
      json records = {{"source_label", ToString(source)},
                      {"loaded", loaded.comments.size()},
                      {"skipped", loaded.skipped},
                      {"kept", comments.size()}};
      if (source == SourceLabel::kEvaluation) {
        std::map<std::string, int> groups;
        for (const Comment& c : comments) {
          ++groups[std::string(ToString(c.l1_group.value_or(L1Group::kOther)))];
        }
        records["l1_groups"] = groups;
      }
      return records;
    });
    return 0;
  }
};

// --- preprocess -----------------------------------------------------------

struct PreprocessCmd {
  std::vector<std::string> inputs;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("--input", inputs, "Canonical collection files")->required();
    app->add_option("--output", output, "Sentence file");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "sentences.jsonl");
    RunStage(ctx, "preprocess", {inputs.begin(), inputs.end()}, {out}, [&] {
      CommentCollection all;
      for (const std::string& in : inputs) {
        CommentCollection part = ParseCollection(ReadFile(in));
        all.insert(all.end(), part.begin(), part.end());
      }
      ValidateCollection(all);
      const auto sentences = PreprocessCollection(all, ctx.config.preprocess);
      WriteFile(out, SerializeSentences(sentences));
      std::map<std::string, int> per_label;
      for (const SentenceRecord& s : sentences) {
        ++per_label[std::string(ToString(s.source_label))];
      }
      return json{{"comments", all.size()},
                  {"sentences", sentences.size()},
                  {"per_source_label", per_label}};
    });
    return 0;
  }
};

// --- annotate -------------------------------------------------------------

struct AnnotateCmd {
  std::string sentences;
  std::string gazetteer;
  std::string import_path;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Sentence file")->required();
    auto* g = app->add_option("--gazetteer", gazetteer, "surface<TAB>LABEL lines");
    auto* i = app->add_option("--import", import_path, "Stand-off annotations to import");
    g->excludes(i);
    app->add_option("--output", output, "Span file");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    if (gazetteer.empty() == import_path.empty()) {
      throw ValidationError("annotate needs exactly one of --gazetteer or --import");
    }
    const fs::path out = ctx.Out(output, "spans.jsonl");
    const fs::path source = gazetteer.empty() ? fs::path(import_path) : fs::path(gazetteer);
    const json records = RunStage(ctx, "annotate", {sentences, source}, {out}, [&] {
      const auto records = LoadSentences(sentences);
      std::vector<EntitySpan> spans;
      std::size_t rejected = 0;
      if (!gazetteer.empty()) {
        spans = GazetteerAnnotate(records, Gazetteer::Load(gazetteer));
      } else {
        ImportResult imported = ImportAnnotations(import_path, records);
        for (const std::string& r : imported.rejected) {
          ctx.err << "annotate: rejected " << r << "\n";
        }
        rejected = imported.rejected.size();
        spans = std::move(imported.spans);
      }
      WriteFile(out, SerializeAnnotations(spans));
      return json{{"spans", spans.size()}, {"rejected", rejected}};
    });
    if (ctx.strict && records.value("rejected", 0) > 0) {
      ctx.err << "annotate: rejected records under --strict\n";
      return static_cast<int>(ErrorKind::kValidation);
    }
    return 0;
  }
};

// --- mask -----------------------------------------------------------------

struct MaskCmd {
  std::string sentences;
  std::string spans;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Sentence file")->required();
    app->add_option("--spans", spans, "Span file")->required();
    app->add_option("--output", output, "Sentence file with masked_text");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "masked.jsonl");
    RunStage(ctx, "mask", {sentences, spans}, {out}, [&] {
      const auto records = LoadSentences(sentences);
      const ImportResult imported = ImportAnnotations(spans, records);
      if (!imported.rejected.empty()) {
        throw ValidationError("span file does not match the sentences: " +
                              imported.rejected.front());
      }
      const auto masked = MaskSentences(records, imported.spans);
      WriteFile(out, SerializeSentences(masked));
      std::size_t changed = 0;
      for (const SentenceRecord& s : masked) changed += (*s.masked_text != s.text) ? 1 : 0;
      return json{{"sentences", masked.size()}, {"masked", changed}};
    });
    return 0;
  }
};

// --- fne ------------------------------------------------------------------

struct FneCmd {
  std::string sentences;
  std::string spans;
  std::string output;
  std::string ranked;
  std::string filter_output;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Sentence file")->required();
    app->add_option("--spans", spans, "Span file")->required();
    app->add_option("--output", output, "Top-k FNE list (CSV)");
    app->add_option("--ranked", ranked, "Full ranked counts (CSV)");
    app->add_option("--filter-output", filter_output,
                    "Evaluation sentences mentioning an FNE");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "fne.csv");
    std::vector<fs::path> outputs = {out};
    if (!ranked.empty()) outputs.emplace_back(ranked);
    if (!filter_output.empty()) outputs.emplace_back(filter_output);
    RunStage(ctx, "fne", {sentences, spans}, outputs, [&] {
      const auto records = LoadSentences(sentences);
      const ImportResult imported = ImportAnnotations(spans, records);
      if (!imported.rejected.empty()) {
        throw ValidationError("span file does not match the sentences: " +
                              imported.rejected.front());
      }
      // Counting runs over the suspect corpus only.
      std::set<std::string> suspect;
      for (const SentenceRecord& s : records) {
        if (s.source_label == SourceLabel::kSuspect) suspect.insert(s.comment_id);
      }
      std::vector<EntitySpan> suspect_spans;
      for (const EntitySpan& span : imported.spans) {
        if (suspect.count(span.comment_id)) suspect_spans.push_back(span);
      }
      const FneList full = CountFne(suspect_spans, suspect, ctx.config.fne);
      const FneList top = TopFne(full, ctx.config.fne.top_k);
      WriteFile(out, SerializeFneCsv(top));
      if (!ranked.empty()) WriteFile(ranked, SerializeFneCsv(full));
      json rec = {{"suspect_comments", suspect.size()},
                  {"distinct_entities", full.size()},
                  {"top_k", top.size()}};
      if (!filter_output.empty()) {
        std::vector<SentenceRecord> eval;
        for (const SentenceRecord& s : records) {
          if (s.source_label == SourceLabel::kEvaluation) eval.push_back(s);
        }
        const auto kept = top.empty() ? std::vector<SentenceRecord>{} : FilterByFne(eval, top);
        WriteFile(filter_output, SerializeSentences(kept));
        rec["filtered_sentences"] = kept.size();
      }
      return rec;
    });
    return 0;
  }
};

// --- embed ----------------------------------------------------------------

struct EmbedCmd {
  std::string sentences;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Sentence file (masked or not)")->required();
    app->add_option("--output", output, "Embedding store");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "embeddings.emb");
    std::vector<fs::path> inputs = {sentences};
    const auto resolve = [&](const std::string& p) {
      return fs::path(p).is_absolute() ? fs::path(p) : ctx.base_dir / p;
    };
    if (ctx.config.provider.kind == ProviderKind::kPrecomputedStore) {
      inputs.push_back(resolve(ctx.config.provider.store));
    }
    if (!ctx.config.vocab.empty()) inputs.push_back(resolve(ctx.config.vocab));
    RunStage(ctx, "embed", inputs, {out}, [&] {
      const auto records = LoadSentences(sentences);
      std::set<std::string> unique;
      for (const SentenceRecord& s : records) {
        unique.insert(s.text);
        if (s.masked_text) unique.insert(*s.masked_text);
      }
      const std::vector<std::string> texts(unique.begin(), unique.end());
      json rec = {{"texts", texts.size()},
                  {"dim", ctx.config.provider.dim},
                  {"provider", ProviderIdentity(ctx.config.provider)}};
      if (!ctx.config.vocab.empty()) {
        const Tokenizer tokenizer(Vocab::Load(resolve(ctx.config.vocab)),
                                  ctx.config.tokenizer);
        std::size_t truncated = 0;
        for (const std::string& t : texts) {
          truncated += tokenizer.Tokenize(t).size() + 2 >
                               static_cast<std::size_t>(ctx.config.tokenizer.max_seq_len)
                           ? 1
                           : 0;
        }
        rec["truncated_sequences"] = truncated;
      }
      if (texts.empty()) throw ValidationError("no sentences to embed");
      auto provider = MakeProvider(ctx.config.provider, ctx.base_dir);
      const auto vectors = Embed(*provider, texts);
      BuildStore(texts, vectors, out);
      return rec;
    });
    return 0;
  }
};

// --- train ----------------------------------------------------------------

struct TrainCmd {
  std::string sentences;
  std::string store;
  std::string output;
  bool masked = false;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Sentence file")->required();
    app->add_option("--store", store, "Embedding store")->required();
    app->add_option("--output", output, "Model file");
    app->add_flag("--masked", masked, "Train on masked_text");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out =
        ctx.Out(output, masked ? "model_masked.txt" : "model_unmasked.txt");
    json snapshot = ctx.config_json;
    snapshot["view"] = masked ? "masked" : "unmasked";
    ctx.config_json = snapshot;
    RunStage(ctx, "train", {sentences, store}, {out}, [&] {
      const auto records = LoadSentences(sentences);
      std::vector<const SentenceRecord*> items;
      std::vector<int> labels;
      TrainingSet(records, &items, &labels);
      if (std::count(labels.begin(), labels.end(), 1) == 0 ||
          std::count(labels.begin(), labels.end(), 0) == 0) {
        throw ValidationError("training needs suspect and random negative sentences");
      }
      const auto chosen = BalancedSample(labels, ctx.config.master_seed);
      std::vector<SentenceRecord> subset;
      std::vector<int> subset_labels;
      for (std::size_t i : chosen) {
        subset.push_back(*items[i]);
        subset_labels.push_back(labels[i]);
      }
      auto provider = StoreProvider(ctx, store);
      const auto vectors = Embed(*provider, Texts(subset, masked));
      std::vector<Example> examples;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        examples.push_back({vectors[i].values, subset_labels[i]});
      }
      TrainConfig tc = ctx.config.train;
      tc.seed = ctx.config.master_seed;
      const LinearClassifier model =
          Train(examples, tc, ProviderIdentity(ctx.config.provider));
      model.Save(out);
      return json{{"examples", examples.size()}, {"dim", model.dim()}};
    });
    return 0;
  }
};

// --- fpr ------------------------------------------------------------------

struct FprCmd {
  std::string model;
  std::string sentences;
  std::string store;
  std::string fne;
  std::string output;
  bool masked = false;

  void Register(CLI::App* app) {
    app->add_option("--model", model, "Model file")->required();
    app->add_option("--sentences", sentences, "Sentence file")->required();
    app->add_option("--store", store, "Embedding store")->required();
    app->add_option("--fne", fne, "FNE list (CSV)");
    app->add_option("--output", output, "FPR JSON");
    app->add_flag("--masked", masked, "Score masked_text");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, masked ? "fpr_masked.json" : "fpr_unmasked.json");
    std::vector<fs::path> inputs = {model, sentences, store};
    if (!fne.empty()) inputs.emplace_back(fne);
    json snapshot = ctx.config_json;
    snapshot["view"] = masked ? "masked" : "unmasked";
    ctx.config_json = snapshot;
    RunStage(ctx, "fpr", inputs, {out}, [&] {
      const LinearClassifier classifier = LinearClassifier::Load(model);
      const auto records = LoadSentences(sentences);
      const FneList list = fne.empty() ? FneList{} : ParseFneCsv(ReadFile(fne));
      auto provider = StoreProvider(ctx, store);
      json groups = json::object();
      for (const auto& [name, members] : EvaluationGroups(records, list)) {
        if (members.empty()) {
          groups[name] = {{"n", 0}, {"fpr", "absent"}};
          continue;
        }
        const double rate = FalsePositiveRate(classifier, Texts(members, masked), *provider,
                                              ctx.config.train.threshold);
        groups[name] = {{"n", members.size()}, {"fpr", rate}};
      }
      const json doc = {{"view", masked ? "masked" : "unmasked"},
                        {"threshold", ctx.config.train.threshold},
                        {"groups", groups}};
      WriteFile(out, doc.dump(2) + "\n");
      return json{{"groups", groups.size()}};
    });
    return 0;
  }
};

// --- cv -------------------------------------------------------------------

struct CvCmd {
  std::string sentences;
  std::string store;
  std::string fne;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("--sentences", sentences, "Masked sentence file")->required();
    app->add_option("--store", store, "Embedding store")->required();
    app->add_option("--fne", fne, "FNE list (CSV)");
    app->add_option("--output", output, "CV report JSON");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "cv_report.json");
    std::vector<fs::path> inputs = {sentences, store};
    if (!fne.empty()) inputs.emplace_back(fne);
    const json records = RunStage(ctx, "cv", inputs, {out}, [&] {
      const auto all = LoadSentences(sentences);
      std::vector<const SentenceRecord*> items;
      CvDataset dataset;
      TrainingSet(all, &items, &dataset.labels);
      std::vector<SentenceRecord> train_records;
      for (const SentenceRecord* s : items) train_records.push_back(*s);
      auto provider = StoreProvider(ctx, store);
      dataset.features_a = Embed(*provider, Texts(train_records, false));
      dataset.features_b = Embed(*provider, Texts(train_records, true));

      const FneList list = fne.empty() ? FneList{} : ParseFneCsv(ReadFile(fne));
      std::vector<EvalGroup> groups;
      for (const auto& [name, members] : EvaluationGroups(all, list)) {
        if (members.empty()) {
          ctx.err << "cv: warning: evaluation group " << name << " is empty\n";
          continue;
        }
        groups.push_back({name, Embed(*provider, Texts(members, false)),
                          Embed(*provider, Texts(members, true))});
      }
      CvConfig cv = ctx.config.cv;
      cv.master_seed = ctx.config.master_seed;
      const auto builder =
          MakeLinearBuilder(ctx.config.train, ProviderIdentity(ctx.config.provider));
      const CvReport report =
          RepeatedKFold(dataset, builder, builder, cv, groups, ctx.config.train.threshold);
      WriteFile(out, SerializeCvReport(report));
      return json{{"folds", report.folds.size()},
                  {"items", dataset.labels.size()},
                  {"groups", report.group_names},
                  {"degenerate_tests", CountDegenerate(report)}};
    });
    return StrictStatus(ctx, records, "cv");
  }
};

// --- report ---------------------------------------------------------------

struct ReportCmd {
  std::string cv;
  std::string output;
  std::string table;

  void Register(CLI::App* app) {
    app->add_option("--cv", cv, "CV report JSON")->required();
    app->add_option("--output", output, "Report JSON");
    app->add_option("--table", table, "Markdown table");
  }

  int Run(Context& ctx) {
    ctx.LoadConfig();
    const fs::path out = ctx.Out(output, "report.json");
    const fs::path md = ctx.Out(table, "report.md");
    const json records = RunStage(ctx, "report", {cv}, {out, md}, [&] {
      const CvReport report = ParseCvReport(ReadFile(cv));
      const ReportFiles files = EmitReport(report, FprTableFromCv(report));
      WriteFile(out, files.json);
      WriteFile(md, files.table);
      return json{{"degenerate_tests", CountDegenerate(report)}};
    });
    return StrictStatus(ctx, records, "report");
  }
};

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  CLI::App app("Named entity masking and bias audit pipeline", "nemaudit");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  app.add_option("--config", ctx.config_path, "Pipeline config (JSON)");
  app.add_option("--seed", ctx.seed, "Override master_seed");
  app.add_flag("--verify", ctx.verify, "Check inputs against upstream manifests");
  app.add_option("--out-dir", ctx.out_dir, "Directory for default output paths");
  app.add_flag("--strict", ctx.strict, "Treat degenerate statistics as an error");

  SynthgenCmd synthgen;
  IngestCmd ingest;
  PreprocessCmd preprocess;
  AnnotateCmd annotate;
  MaskCmd mask;
  FneCmd fne;
  EmbedCmd embed;
  TrainCmd train;
  FprCmd fpr;
  CvCmd cv;
  ReportCmd report;
  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
  auto add = [&](auto& cmd, const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.Register(sub);
    commands.emplace_back(sub, [&cmd, &ctx] { return cmd.Run(ctx); });
  };
  add(synthgen, "synthgen", "Generate synthetic corpora and a matching config");
  add(ingest, "ingest", "Load, filter and label one raw corpus");
  add(preprocess, "preprocess", "Clean and split comments into sentences");
  add(annotate, "annotate", "Annotate entities with a gazetteer or import spans");
  add(mask, "mask", "Replace entity spans with their label tokens");
  add(fne, "fne", "Count frequent named entities in the suspect corpus");
  add(embed, "embed", "Embed every sentence variant into a store");
  add(train, "train", "Train one classifier on a balanced sample");
  add(fpr, "fpr", "False positive rates per evaluation group");
  add(cv, "cv", "Repeated k-fold comparison of unmasked and masked models");
  add(report, "report", "Render the classification and Type I error tables");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kValidation);
  }

  try {
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) return run();
    }
    return static_cast<int>(ErrorKind::kValidation);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kIo);
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kValidation);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kValidation);
  }
}

}  // namespace nemaudit
