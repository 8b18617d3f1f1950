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

#include "nemaudit/corpus.h"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "json.hpp"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/utf8.h"

namespace nemaudit {
namespace {

using nlohmann::json;

bool ContainsFolded(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return false;
  return utf8::ToLower(haystack).find(utf8::ToLower(needle)) !=
         std::string::npos;
}

// Fields shared by both input formats, already extracted as strings.
struct RawRecord {
  std::optional<std::string> id;
  std::optional<std::string> author;
  std::optional<std::string> body;
  std::string subreddit;
  std::optional<std::string> created_utc;
  std::optional<std::string> flair;
  std::optional<std::string> l1_group;
  std::optional<std::string> source_label;
};

std::optional<std::string> JsonString(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_number()) return FormatDouble(it->get<double>());
  return std::nullopt;
}

// Returns an empty string when the record is usable, otherwise the reason it
// was skipped.
std::string BuildComment(const RawRecord& raw,
                         std::optional<SourceLabel> forced_label,
                         Comment* out) {
  SourceLabel label = SourceLabel::kSuspect;
  if (forced_label) {
    label = *forced_label;
  } else {
    if (!raw.source_label) return "missing source_label";
    try {
      label = ParseSourceLabel(*raw.source_label);
    } catch (const Error&) {
      return "bad source_label '" + *raw.source_label + "'";
    }
  }
  if (!raw.id || raw.id->empty()) return "missing id";
  if (!raw.author || raw.author->empty()) return "missing author";
  if (!raw.body) return "missing body";
  if (raw.body->empty()) return "empty body";
  out->id = *raw.id;
  out->author = *raw.author;
  out->body = *raw.body;
  out->subreddit = raw.subreddit;
  out->created_utc = 0;
  if (raw.created_utc && !raw.created_utc->empty()) {
    try {
      out->created_utc = ParseInt(*raw.created_utc);
    } catch (const Error&) {
      // Some exports write fractional epoch seconds.
      try {
        out->created_utc =
            static_cast<std::int64_t>(ParseDouble(*raw.created_utc));
      } catch (const Error&) {
        return "bad created_utc '" + *raw.created_utc + "'";
      }
    }
  }
  out->flair = raw.flair;
  if (out->flair && out->flair->empty()) out->flair.reset();
  out->source_label = label;
  out->l1_group.reset();
  if (label == SourceLabel::kEvaluation) {
    out->l1_group = L1Group::kOther;
    if (raw.l1_group && !raw.l1_group->empty()) {
      try {
        out->l1_group = ParseL1Group(*raw.l1_group);
      } catch (const Error&) {
        return "bad l1_group '" + *raw.l1_group + "'";
      }
    }
  }
  return "";
}

void ParseJsonRecords(std::string_view content,
                      std::optional<SourceLabel> label,
                      LoadResult* result) {
  std::size_t line_no = 0;
  for (const std::string& line : SplitLines(content)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
      ++result->skipped;
      result->warnings.push_back("line " + std::to_string(line_no) +
                                 ": not a JSON object");
      continue;
    }
    RawRecord raw;
    raw.id = JsonString(obj, "id");
    raw.author = JsonString(obj, "author");
    raw.body = JsonString(obj, "body");
    raw.subreddit = JsonString(obj, "subreddit").value_or("");
    raw.created_utc = JsonString(obj, "created_utc");
    raw.flair = JsonString(obj, "flair");
    raw.l1_group = JsonString(obj, "l1_group");
    raw.source_label = JsonString(obj, "source_label");
    Comment comment;
    std::string reason = BuildComment(raw, label, &comment);
    if (!reason.empty()) {
      ++result->skipped;
      result->warnings.push_back("line " + std::to_string(line_no) + ": " +
                                 reason);
      continue;
    }
    result->comments.push_back(std::move(comment));
  }
}

void ParseCsvRecords(std::string_view content, SourceLabel label,
                     LoadResult* result) {
  const auto rows = ParseCsv(content);
  if (rows.empty()) return;
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < rows[0].size(); ++i) column[rows[0][i]] = i;
  auto field = [&](const std::vector<std::string>& row,
                   const char* name) -> std::optional<std::string> {
    auto it = column.find(name);
    if (it == column.end() || it->second >= row.size()) return std::nullopt;
    return row[it->second];
  };
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != rows[0].size()) {
      ++result->skipped;
      result->warnings.push_back("record " + std::to_string(r) + ": expected " +
                                 std::to_string(rows[0].size()) +
                                 " fields, got " + std::to_string(row.size()));
      continue;
    }
    RawRecord raw;
    raw.id = field(row, "id");
    raw.author = field(row, "author");
    raw.body = field(row, "body");
    raw.subreddit = field(row, "subreddit").value_or("");
    raw.created_utc = field(row, "created_utc");
    raw.flair = field(row, "flair");
    raw.l1_group = field(row, "l1_group");
    Comment comment;
    std::string reason = BuildComment(raw, label, &comment);
    if (!reason.empty()) {
      ++result->skipped;
      result->warnings.push_back("record " + std::to_string(r) + ": " + reason);
      continue;
    }
    result->comments.push_back(std::move(comment));
  }
}

void CheckUniqueIds(const CommentCollection& comments) {
  std::map<std::string, int> seen;
  for (const Comment& c : comments) ++seen[c.id];
  std::string duplicates;
  for (const auto& [id, count] : seen) {
    if (count < 2) continue;
    if (!duplicates.empty()) duplicates += ", ";
    duplicates += id;
  }
  if (!duplicates.empty()) {
    throw ValidationError("duplicate comment ids: " + duplicates);
  }
}

}  // namespace

std::string_view ToString(SourceLabel label) {
  switch (label) {
    case SourceLabel::kSuspect:
      return "Suspect";
    case SourceLabel::kRandomNegative:
      return "RandomNegative";
    case SourceLabel::kEvaluation:
      return "Evaluation";
  }
  return "Suspect";
}

std::string_view ToString(L1Group group) {
  switch (group) {
    case L1Group::kRussian:
      return "Russian";
    case L1Group::kEnglish:
      return "English";
    case L1Group::kOther:
      return "Other";
  }
  return "Other";
}

SourceLabel ParseSourceLabel(std::string_view text) {
  const std::string folded = utf8::ToLower(text);
  if (folded == "suspect") return SourceLabel::kSuspect;
  if (folded == "randomnegative" || folded == "random") {
    return SourceLabel::kRandomNegative;
  }
  if (folded == "evaluation") return SourceLabel::kEvaluation;
  throw ValidationError("unknown source label '" + std::string(text) + "'");
}

L1Group ParseL1Group(std::string_view text) {
  const std::string folded = utf8::ToLower(text);
  if (folded == "russian") return L1Group::kRussian;
  if (folded == "english") return L1Group::kEnglish;
  if (folded == "other") return L1Group::kOther;
  throw ValidationError("unknown L1 group '" + std::string(text) + "'");
}

InputFormat ParseInputFormat(std::string_view text) {
  const std::string folded = utf8::ToLower(text);
  if (folded == "ndjson" || folded == "jsonl" || folded == "json") {
    return InputFormat::kDelimitedJsonRecords;
  }
  if (folded == "csv") return InputFormat::kCsv;
  throw ValidationError("unknown input format '" + std::string(text) + "'");
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view content) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < content.size()) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
      end_row();
      ++i;
    } else if (c == '\n') {
      end_row();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw Error(ErrorKind::kValidation, "csv: unterminated quoted field");
  if (field_started || !row.empty()) end_row();
  return rows;
}

LoadResult ParseComments(std::string_view content, InputFormat format,
                         SourceLabel label) {
  LoadResult result;
  if (format == InputFormat::kDelimitedJsonRecords) {
    ParseJsonRecords(content, label, &result);
  } else {
    ParseCsvRecords(content, label, &result);
  }
  CheckUniqueIds(result.comments);
  return result;
}

LoadResult LoadComments(const std::filesystem::path& path, InputFormat format,
                        SourceLabel label) {
  return ParseComments(ReadFile(path), format, label);
}

CommentCollection ParseCollection(std::string_view content) {
  LoadResult result;
  ParseJsonRecords(content, std::nullopt, &result);
  if (result.skipped > 0) {
    throw ValidationError("malformed canonical collection: " +
                          result.warnings.front());
  }
  ValidateCollection(result.comments);
  return std::move(result.comments);
}

CommentCollection AssignL1Groups(
    const CommentCollection& comments,
    const std::map<std::string, std::string>& flair_map,
    std::span<const FlairRule> rules) {
  for (const FlairRule& rule : rules) {
    if (rule.pattern.empty()) throw ValidationError("empty flair pattern");
  }
  CommentCollection out = comments;
  for (Comment& c : out) {
    if (c.source_label != SourceLabel::kEvaluation) {
      throw ValidationError("comment " + c.id +
                            " is not from an evaluation collection");
    }
    c.l1_group = L1Group::kOther;
    auto it = flair_map.find(c.author);
    if (it == flair_map.end()) continue;
    for (const FlairRule& rule : rules) {
      if (ContainsFolded(it->second, rule.pattern)) {
        c.l1_group = rule.target_group;
        break;
      }
    }
  }
  return out;
}

std::map<std::string, std::string> FlairMapFromComments(
    const CommentCollection& comments) {
  std::map<std::string, std::string> flairs;
  for (const Comment& c : comments) {
    if (c.flair && !c.flair->empty()) flairs.emplace(c.author, *c.flair);
  }
  return flairs;
}

CommentCollection DedupAndFilterUsers(
    const CommentCollection& comments,
    const std::set<std::string>& existing_users,
    std::span<const std::string> bot_markers) {
  auto is_bot = [&](const Comment& c) {
    for (const std::string& marker : bot_markers) {
      if (ContainsFolded(c.author, marker)) return true;
      if (c.flair && ContainsFolded(*c.flair, marker)) return true;
    }
    return false;
  };
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const Comment& c = comments[i];
    if (existing_users.contains(c.author) || is_bot(c)) continue;
    kept.push_back(i);
  }
  // Earliest timestamp wins; ties go to the earlier record.
  std::map<std::pair<std::string, std::string>, std::size_t> best;
  for (std::size_t i : kept) {
    const Comment& c = comments[i];
    auto [it, inserted] = best.try_emplace({c.author, c.body}, i);
    if (!inserted && c.created_utc < comments[it->second].created_utc) {
      it->second = i;
    }
  }
  CommentCollection out;
  for (std::size_t i : kept) {
    const Comment& c = comments[i];
    if (best.at({c.author, c.body}) == i) out.push_back(c);
  }
  return out;
}

void ValidateCollection(const CommentCollection& comments) {
  CheckUniqueIds(comments);
  for (const Comment& c : comments) {
    if (c.id.empty()) throw ValidationError("comment with empty id");
    if (c.body.empty()) throw ValidationError("comment " + c.id + " has empty body");
    const bool evaluation = c.source_label == SourceLabel::kEvaluation;
    if (evaluation != c.l1_group.has_value()) {
      throw ValidationError("comment " + c.id +
                            ": l1_group must be set exactly for evaluation "
                            "comments");
    }
  }
}

std::string SerializeCollection(const CommentCollection& comments) {
  std::string out;
  for (const Comment& c : comments) {
    json obj = {{"id", c.id},
                {"author", c.author},
                {"body", c.body},
                {"subreddit", c.subreddit},
                {"created_utc", c.created_utc},
                {"source_label", ToString(c.source_label)}};
    if (c.flair) obj["flair"] = *c.flair;
    if (c.l1_group) obj["l1_group"] = ToString(*c.l1_group);
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

}  // namespace nemaudit
