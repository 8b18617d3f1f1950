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

#include "nemaudit/preprocess.h"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "json.hpp"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/utf8.h"

namespace nemaudit {
namespace {

using nlohmann::json;

bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\v' ||
         c == '\f';
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsAsciiSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsAsciiSpace(s.back())) s.remove_suffix(1);
  return s;
}

std::string Unescape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      switch (text[i + 1]) {
        case 'n':
        case 'r':
          out.push_back('\n');
          ++i;
          continue;
        case 't':
          out.push_back('\t');
          ++i;
          continue;
        case '"':
        case '\'':
        case '\\':
          out.push_back(text[i + 1]);
          ++i;
          continue;
        default:
          break;
      }
    }
    out.push_back(text[i]);
  }
  return out;
}

std::string RemoveTabs(std::string_view text) {
  static constexpr std::string_view kTabEntity = "&#009;";
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.substr(i, kTabEntity.size()) == kTabEntity) {
      i += kTabEntity.size() - 1;
      continue;
    }
    if (text[i] == '\t') continue;
    out.push_back(text[i]);
  }
  return out;
}

std::string_view StripQuoteMarkers(std::string_view line) {
  while (true) {
    while (!line.empty() && IsAsciiSpace(line.front())) line.remove_prefix(1);
    if (line.starts_with("&gt;")) {
      line.remove_prefix(4);
    } else if (line.starts_with(">")) {
      line.remove_prefix(1);
    } else {
      return line;
    }
  }
}

std::string NormalizeOnce(std::string_view body) {
  std::string text = RemoveTabs(Unescape(body));
  for (char& c : text) {
    if (c == '\r') c = '\n';
  }
  std::string joined;
  joined.reserve(text.size());
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line = StripQuoteMarkers(
        std::string_view(text).substr(start, end - start));
    joined.append(line);
    joined.push_back(' ');
    start = end + 1;
  }
  std::string out;
  out.reserve(joined.size());
  bool in_space = false;
  for (char c : joined) {
    if (IsAsciiSpace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

bool IsTerminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Length in bytes of a closing quote or bracket at the start of s, or 0.
std::size_t ClosingMarkLength(std::string_view s) {
  if (s.empty()) return 0;
  if (s[0] == '"' || s[0] == '\'' || s[0] == ')' || s[0] == ']') return 1;
  for (std::string_view mark : {"”", "’", "»"}) {
    if (s.starts_with(mark)) return mark.size();
  }
  return 0;
}

char32_t FirstCodepoint(std::string_view s) {
  // Enough bytes for one code point.
  const std::u32string decoded = utf8::Decode(s.substr(0, 4));
  return decoded.empty() ? 0 : decoded[0];
}

bool OpensSentence(char32_t cp) {
  return utf8::IsUpper(cp) || utf8::IsDigit(cp) || cp == '"' || cp == '\'' ||
         cp == 0x201C || cp == 0x2018 || cp == 0x00AB;
}

// Token immediately before position `dot`, lowercased, without leading
// opening quotes or brackets.
std::string TokenBefore(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !IsAsciiSpace(text[start - 1])) --start;
  std::string_view token = text.substr(start, dot - start);
  while (!token.empty() &&
         (token.front() == '"' || token.front() == '\'' ||
          token.front() == '(' || token.front() == '[')) {
    token.remove_prefix(1);
  }
  return utf8::ToLower(token);
}

bool IsInitial(std::string_view lowered_token) {
  const std::u32string cps = utf8::Decode(lowered_token);
  return cps.size() == 1 && utf8::IsWordChar(cps[0]) &&
         !utf8::IsDigit(cps[0]) && cps[0] != '_';
}

bool IsUrlSchemeChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '+' || c == '.' || c == '-';
}

bool IsAsciiAlpha(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool IsAsciiAlnum(char c) {
  return IsAsciiAlpha(c) || (c >= '0' && c <= '9');
}

// Byte offset within `token` where a URL begins, or npos.
std::size_t UrlStart(std::string_view token) {
  std::size_t best = std::string_view::npos;
  for (std::size_t p = token.find("://"); p != std::string_view::npos;
       p = token.find("://", p + 1)) {
    if (p + 3 >= token.size()) continue;
    std::size_t q = p;
    while (q > 0 && IsUrlSchemeChar(token[q - 1])) --q;
    while (q < p && !IsAsciiAlpha(token[q])) ++q;
    if (q < p) {
      best = std::min(best, q);
      break;
    }
  }
  const std::string lowered = utf8::ToLower(token);
  for (std::size_t p = lowered.find("www."); p != std::string::npos;
       p = lowered.find("www.", p + 1)) {
    if (p + 4 >= token.size()) continue;
    if (p > 0 && IsAsciiAlnum(token[p - 1])) continue;
    best = std::min(best, p);
    break;
  }
  return best;
}

const std::set<std::string, std::less<>>& Abbreviations() {
  static const auto* set = new std::set<std::string, std::less<>>{
      "mr",   "mrs",  "ms",    "dr",  "prof", "sr",  "jr",  "st",
      "vs",   "etc",  "e.g",   "i.e", "u.s",  "u.k", "u.n", "u.s.a",
      "a.m",  "p.m",  "inc",   "ltd", "corp", "co",  "no",  "approx",
      "fig",  "gen",  "gov",   "sen", "rep",  "rev", "lt",  "col",
      "capt", "sgt",  "jan",   "feb", "mar",  "apr", "aug", "sep",
      "sept", "oct",  "nov",   "dec", "mt",   "ft",  "vol", "cf",
      "al",   "est",  "dept",  "univ"};
  return *set;
}

json SentenceToJson(const SentenceRecord& r) {
  json obj = {{"comment_id", r.comment_id},
              {"sentence_index", r.sentence_index},
              {"text", r.text},
              {"source_label", ToString(r.source_label)}};
  if (r.masked_text) obj["masked_text"] = *r.masked_text;
  if (r.l1_group) obj["l1_group"] = ToString(*r.l1_group);
  return obj;
}

}  // namespace

void PreprocessConfig::Validate() const {
  if (min_sentence_chars < 1) {
    throw ValidationError("min_sentence_chars must be >= 1");
  }
}

std::string NormalizeRaw(std::string_view body) {
  std::string current(body);
  while (true) {
    std::string next = NormalizeOnce(current);
    if (next == current) return next;
    current = std::move(next);
  }
}

bool IsProtectedAbbreviation(std::string_view lowered_token) {
  return Abbreviations().contains(lowered_token);
}

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> sentences;
  const std::size_t n = text.size();
  std::size_t segment_start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!IsTerminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < n && IsTerminal(text[run_end])) ++run_end;
    std::size_t close = run_end;
    while (std::size_t len = ClosingMarkLength(text.substr(close))) {
      close += len;
    }
    if (close >= n || !IsAsciiSpace(text[close])) {
      i = std::max(close, i + 1);
      continue;
    }
    std::size_t next = close;
    while (next < n && IsAsciiSpace(text[next])) ++next;
    if (next >= n) break;
    bool boundary = OpensSentence(FirstCodepoint(text.substr(next)));
    if (boundary && run_end == i + 1 && text[i] == '.') {
      const std::string token = TokenBefore(text, i);
      if (IsProtectedAbbreviation(token) || IsInitial(token)) boundary = false;
    }
    if (boundary) {
      std::string_view sentence =
          Trim(text.substr(segment_start, close - segment_start));
      if (!sentence.empty()) sentences.emplace_back(sentence);
      segment_start = next;
    }
    i = next;
  }
  std::string_view tail = Trim(text.substr(std::min(segment_start, n)));
  if (!tail.empty()) sentences.emplace_back(tail);
  return sentences;
}

std::string ReplaceUrls(std::string_view sentence,
                        std::string_view url_placeholder) {
  std::string out;
  out.reserve(sentence.size());
  std::size_t i = 0;
  const std::size_t n = sentence.size();
  while (i < n) {
    if (IsAsciiSpace(sentence[i])) {
      out.push_back(sentence[i++]);
      continue;
    }
    std::size_t end = i;
    while (end < n && !IsAsciiSpace(sentence[end])) ++end;
    std::string_view token = sentence.substr(i, end - i);
    std::size_t start = UrlStart(token);
    if (start == std::string_view::npos) {
      out.append(token);
    } else {
      out.append(token.substr(0, start));
      out.append(url_placeholder);
    }
    i = end;
  }
  return out;
}

std::vector<SentenceRecord> PreprocessComment(const Comment& comment,
                                              const PreprocessConfig& config) {
  std::vector<SentenceRecord> records;
  const std::string normalized = NormalizeRaw(comment.body);
  for (const std::string& sentence : SplitSentences(normalized)) {
    std::string cleaned = ReplaceUrls(sentence, config.url_placeholder);
    if (utf8::Length(cleaned) <
        static_cast<std::size_t>(config.min_sentence_chars)) {
      continue;
    }
    SentenceRecord record;
    record.comment_id = comment.id;
    record.sentence_index = static_cast<int>(records.size());
    record.text = std::move(cleaned);
    record.source_label = comment.source_label;
    record.l1_group = comment.l1_group;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<SentenceRecord> PreprocessCollection(
    const CommentCollection& comments, const PreprocessConfig& config) {
  config.Validate();
  std::vector<SentenceRecord> all;
  for (const Comment& c : comments) {
    auto records = PreprocessComment(c, config);
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
  }
  SortSentences(&all);
  return all;
}

void SortSentences(std::vector<SentenceRecord>* records) {
  std::stable_sort(records->begin(), records->end(),
                   [](const SentenceRecord& a, const SentenceRecord& b) {
                     if (a.comment_id != b.comment_id) {
                       return a.comment_id < b.comment_id;
                     }
                     return a.sentence_index < b.sentence_index;
                   });
}

std::string SerializeSentences(std::span<const SentenceRecord> records) {
  std::string out;
  for (const SentenceRecord& r : records) {
    out += SentenceToJson(r).dump(-1, ' ', false,
                                  json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<SentenceRecord> ParseSentences(std::string_view content) {
  std::vector<SentenceRecord> records;
  std::size_t line_no = 0;
  for (const std::string& line : SplitLines(content)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::string where = "sentence line " + std::to_string(line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      throw ValidationError(where + ": not a JSON object");
    }
    try {
      SentenceRecord r;
      r.comment_id = obj.at("comment_id").get<std::string>();
      r.sentence_index = obj.at("sentence_index").get<int>();
      r.text = obj.at("text").get<std::string>();
      if (auto it = obj.find("masked_text"); it != obj.end()) {
        r.masked_text = it->get<std::string>();
      }
      r.source_label =
          ParseSourceLabel(obj.at("source_label").get<std::string>());
      if (auto it = obj.find("l1_group"); it != obj.end()) {
        r.l1_group = ParseL1Group(it->get<std::string>());
      }
      if (r.sentence_index < 0) {
        throw ValidationError("negative sentence_index");
      }
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return records;
}

}  // namespace nemaudit
