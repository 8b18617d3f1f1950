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

#ifndef NEMAUDIT_CORPUS_H_
#define NEMAUDIT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nemaudit {

// Role a comment collection plays: positive training class, negative training
// class, or the negative-only L1 evaluation pool.
enum class SourceLabel { kSuspect, kRandomNegative, kEvaluation };

enum class L1Group { kRussian, kEnglish, kOther };

std::string_view ToString(SourceLabel label);
std::string_view ToString(L1Group group);
// Accepts the canonical names and the short forms "suspect", "random",
// "evaluation" (case-insensitive).
SourceLabel ParseSourceLabel(std::string_view text);
L1Group ParseL1Group(std::string_view text);

struct Comment {
  std::string id;
  std::string author;
  std::string body;
  std::string subreddit;
  std::int64_t created_utc = 0;
  std::optional<std::string> flair;
  SourceLabel source_label = SourceLabel::kSuspect;
  // Present iff source_label == kEvaluation.
  std::optional<L1Group> l1_group;

  bool operator==(const Comment&) const = default;
};

using CommentCollection = std::vector<Comment>;

struct FlairRule {
  std::string pattern;
  L1Group target_group = L1Group::kOther;
};

enum class InputFormat { kDelimitedJsonRecords, kCsv };

InputFormat ParseInputFormat(std::string_view text);

struct LoadResult {
  CommentCollection comments;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

// Records missing id, author or body (or with an empty body) are skipped and
// counted. Duplicate ids raise a validation error naming every duplicate.
LoadResult ParseComments(std::string_view content, InputFormat format,
                         SourceLabel label);
LoadResult LoadComments(const std::filesystem::path& path, InputFormat format,
                        SourceLabel label);

// Reads a file written by SerializeCollection. Every record must be valid;
// the source label comes from each record.
CommentCollection ParseCollection(std::string_view content);

// RFC-4180 records; quoted fields may contain separators, doubled quotes and
// line breaks.
std::vector<std::vector<std::string>> ParseCsv(std::string_view content);

// Assigns each evaluation comment the group of the first rule whose pattern
// occurs (case-insensitively) in its author's flair; unmatched authors get
// kOther.
CommentCollection AssignL1Groups(
    const CommentCollection& comments,
    const std::map<std::string, std::string>& flair_map,
    std::span<const FlairRule> rules);

// author -> flair, taken from the comments' own flair fields. The first
// non-empty flair seen for an author wins.
std::map<std::string, std::string> FlairMapFromComments(
    const CommentCollection& comments);

// Drops comments by existing users and by authors whose name or flair contains
// a bot marker, then collapses duplicate (author, body) pairs to the earliest
// created_utc. Input order is otherwise preserved.
CommentCollection DedupAndFilterUsers(
    const CommentCollection& comments,
    const std::set<std::string>& existing_users,
    std::span<const std::string> bot_markers);

// Throws Error(kValidation) describing the first violated invariant.
void ValidateCollection(const CommentCollection& comments);

// Canonical newline-delimited JSON, one compact object per comment with keys
// in sorted order.
std::string SerializeCollection(const CommentCollection& comments);

}  // namespace nemaudit

#endif  // NEMAUDIT_CORPUS_H_
