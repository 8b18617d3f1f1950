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

#ifndef NEMAUDIT_NERMASK_H_
#define NEMAUDIT_NERMASK_H_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nemaudit/entity_label.h"
#include "nemaudit/preprocess.h"

namespace nemaudit {

// Offsets count Unicode scalar values of the sentence text, start inclusive
// and end exclusive.
struct EntitySpan {
  std::string comment_id;
  int sentence_index = 0;
  int start = 0;
  int end = 0;
  EntityLabel label = EntityLabel::kOther;
  std::string surface;

  bool operator==(const EntitySpan&) const = default;
};

struct FneConfig {
  int top_k = 10;
  std::set<EntityLabel> excluded_labels = {
      EntityLabel::kDate, EntityLabel::kCardinal, EntityLabel::kPercent};
  std::set<std::string> excluded_surfaces = {":D"};

  void Validate() const;
};

struct FneEntry {
  std::string surface;
  EntityLabel label = EntityLabel::kOther;
  int count = 0;

  bool operator==(const FneEntry&) const = default;
};

using FneList = std::vector<FneEntry>;

// Case-insensitive whole-word phrase matcher over code points. A phrase edge
// that is a word character must not touch another word character.
class PhraseMatcher {
 public:
  struct Match {
    int start = 0;
    int end = 0;
    int value = 0;
  };

  // Returns false when the folded phrase was already present.
  bool Add(std::string_view phrase, int value);

  // Every whole-word occurrence, including overlapping ones.
  std::vector<Match> FindAll(std::u32string_view folded_text) const;
  bool ContainsAny(std::string_view text) const;
  std::optional<int> ValueOf(std::string_view phrase) const;
  std::size_t size() const { return count_; }

 private:
  struct Node {
    std::map<char32_t, int> next;
    std::optional<int> value;
  };
  std::vector<Node> nodes_ = {Node{}};
  std::size_t count_ = 0;
};

class Gazetteer {
 public:
  // Throws on an empty surface or a surface already mapped to another label.
  void Add(std::string_view surface, EntityLabel label);

  // Lines of "surface<TAB>LABEL"; blank lines and lines starting with '#' are
  // ignored.
  static Gazetteer Parse(std::string_view content);
  static Gazetteer Load(const std::filesystem::path& path);

  // Non-overlapping matches sorted by start. Overlaps resolve to the longest
  // match, then the leftmost. Text inside mask tokens is never matched.
  std::vector<EntitySpan> Annotate(std::string_view sentence) const;

  std::size_t size() const { return labels_.size(); }

 private:
  PhraseMatcher matcher_;
  std::vector<EntityLabel> labels_;
};

std::vector<EntitySpan> GazetteerAnnotate(
    std::span<const SentenceRecord> sentences, const Gazetteer& gazetteer);

// Throws Error(kValidation) when offsets fall outside the sentence or the
// surface differs from the covered substring.
void ValidateSpan(const EntitySpan& span, std::string_view sentence);

struct ImportResult {
  std::vector<EntitySpan> spans;
  // One "line N: reason" entry per rejected record.
  std::vector<std::string> rejected;
};

// Stand-off records are validated against the sentences they reference.
ImportResult ParseAnnotations(std::string_view content,
                              std::span<const SentenceRecord> sentences);
ImportResult ImportAnnotations(const std::filesystem::path& path,
                               std::span<const SentenceRecord> sentences);
std::string SerializeAnnotations(std::span<const EntitySpan> spans);

// Replaces each span with its "[LABEL]" token. Spans must lie within the
// sentence and must not overlap; adjacent spans are fine.
std::string MaskSentence(std::string_view sentence,
                         std::span<const EntitySpan> spans);

// Sets masked_text on every record; records without spans keep their text.
std::vector<SentenceRecord> MaskSentences(
    std::span<const SentenceRecord> sentences,
    std::span<const EntitySpan> spans);

// Trim + case fold.
std::string NormalizeSurface(std::string_view surface);

// Number of distinct comments mentioning each (surface, label), ranked by
// count and then surface. Every span must reference a known comment.
FneList CountFne(std::span<const EntitySpan> spans,
                 const std::set<std::string>& known_comments,
                 const FneConfig& config);

FneList TopFne(const FneList& ranked, int top_k);

// Sentences with at least one whole-word, case-insensitive FNE mention.
std::vector<SentenceRecord> FilterByFne(
    std::span<const SentenceRecord> sentences, const FneList& fne);

std::string SerializeFneCsv(const FneList& fne);
FneList ParseFneCsv(std::string_view content);

}  // namespace nemaudit

#endif  // NEMAUDIT_NERMASK_H_
