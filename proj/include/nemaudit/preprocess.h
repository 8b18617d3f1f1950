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

#ifndef NEMAUDIT_PREPROCESS_H_
#define NEMAUDIT_PREPROCESS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nemaudit/corpus.h"

namespace nemaudit {

// One cleaned sentence and where it came from.
struct SentenceRecord {
  std::string comment_id;
  int sentence_index = 0;
  std::string text;
  std::optional<std::string> masked_text;
  SourceLabel source_label = SourceLabel::kSuspect;
  std::optional<L1Group> l1_group;

  bool operator==(const SentenceRecord&) const = default;
};

struct PreprocessConfig {
  int min_sentence_chars = 10;
  std::string url_placeholder = "[URL]";

  void Validate() const;
};

// Unescapes \n \t \r \" \' \\ sequences, drops tabs and the &#009; entity,
// strips leading quote markers ("&gt;" or ">") from every line, joins lines
// and collapses whitespace. Applied until the text stops changing, so the
// result is a fixed point.
std::string NormalizeRaw(std::string_view body);

// Rule based splitter. A sentence ends at a run of '.', '!' or '?' (plus any
// closing quotes or brackets) followed by whitespace and then an uppercase
// letter, a digit or an opening quote. A lone '.' after a known abbreviation
// or a single letter does not end a sentence.
std::vector<std::string> SplitSentences(std::string_view text);

// True for the lowercased token (without its final period) if it is a
// protected abbreviation.
bool IsProtectedAbbreviation(std::string_view lowered_token);

// Replaces every whitespace-delimited run starting at "scheme://" or "www."
// with the placeholder.
std::string ReplaceUrls(std::string_view sentence,
                        std::string_view url_placeholder);

// normalize -> split -> replace URLs -> length filter. Indices are assigned
// after filtering, starting at 0.
std::vector<SentenceRecord> PreprocessComment(const Comment& comment,
                                              const PreprocessConfig& config);

// All comments, ordered by (comment_id, sentence_index).
std::vector<SentenceRecord> PreprocessCollection(
    const CommentCollection& comments, const PreprocessConfig& config);

void SortSentences(std::vector<SentenceRecord>* records);

std::string SerializeSentences(std::span<const SentenceRecord> records);
std::vector<SentenceRecord> ParseSentences(std::string_view content);

}  // namespace nemaudit

#endif  // NEMAUDIT_PREPROCESS_H_
