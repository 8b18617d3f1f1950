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

#include "nemaudit/nermask.h"

#include <algorithm>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "nemaudit/corpus.h"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/utf8.h"

namespace nemaudit {
namespace {

using nlohmann::json;

using SentenceKey = std::pair<std::string, int>;

std::string_view TrimView(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Code point ranges covered by mask tokens such as "[GPE]".
std::vector<std::pair<int, int>> MaskTokenRanges(std::u32string_view text) {
  static const std::vector<std::u32string> kMasks = [] {
    std::vector<std::u32string> masks;
    for (EntityLabel label : kAllEntityLabels) {
      masks.push_back(utf8::Decode(MaskToken(label)));
    }
    return masks;
  }();
  std::vector<std::pair<int, int>> ranges;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '[') continue;
    for (const std::u32string& m : kMasks) {
      if (text.substr(i, m.size()) == m) {
        ranges.emplace_back(static_cast<int>(i), static_cast<int>(i + m.size()));
        break;
      }
    }
  }
  return ranges;
}

std::string CsvField(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

void FneConfig::Validate() const {
  if (top_k < 1) throw ValidationError("fne top_k must be >= 1");
}

bool PhraseMatcher::Add(std::string_view phrase, int value) {
  const std::u32string folded = utf8::ToLower(std::u32string_view(utf8::Decode(phrase)));
  if (folded.empty()) throw ValidationError("empty phrase");
  int node = 0;
  for (char32_t cp : folded) {
    auto it = nodes_[node].next.find(cp);
    if (it == nodes_[node].next.end()) {
      nodes_.push_back(Node{});
      const int child = static_cast<int>(nodes_.size()) - 1;
      nodes_[node].next.emplace(cp, child);
      node = child;
    } else {
      node = it->second;
    }
  }
  if (nodes_[node].value) return false;
  nodes_[node].value = value;
  ++count_;
  return true;
}

std::vector<PhraseMatcher::Match> PhraseMatcher::FindAll(
    std::u32string_view folded_text) const {
  std::vector<Match> matches;
  const std::size_t n = folded_text.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && utf8::IsWordChar(folded_text[i]) &&
        utf8::IsWordChar(folded_text[i - 1])) {
      continue;
    }
    int node = 0;
    for (std::size_t e = i; e < n; ++e) {
      auto it = nodes_[node].next.find(folded_text[e]);
      if (it == nodes_[node].next.end()) break;
      node = it->second;
      if (!nodes_[node].value) continue;
      const std::size_t end = e + 1;
      if (end < n && utf8::IsWordChar(folded_text[e]) &&
          utf8::IsWordChar(folded_text[end])) {
        continue;
      }
      matches.push_back(
          {static_cast<int>(i), static_cast<int>(end), *nodes_[node].value});
    }
  }
  return matches;
}

bool PhraseMatcher::ContainsAny(std::string_view text) const {
  const std::u32string folded = utf8::ToLower(std::u32string_view(utf8::Decode(text)));
  return !FindAll(folded).empty();
}

std::optional<int> PhraseMatcher::ValueOf(std::string_view phrase) const {
  const std::u32string folded = utf8::ToLower(std::u32string_view(utf8::Decode(phrase)));
  int node = 0;
  for (char32_t cp : folded) {
    auto it = nodes_[node].next.find(cp);
    if (it == nodes_[node].next.end()) return std::nullopt;
    node = it->second;
  }
  return nodes_[node].value;
}

void Gazetteer::Add(std::string_view surface, EntityLabel label) {
  if (TrimView(surface).empty()) throw ValidationError("empty gazetteer surface");
  if (auto existing = matcher_.ValueOf(surface)) {
    if (labels_[*existing] != label) {
      throw ValidationError("gazetteer surface '" + std::string(surface) +
                            "' mapped to both " +
                            std::string(ToString(labels_[*existing])) + " and " +
                            std::string(ToString(label)));
    }
    return;
  }
  matcher_.Add(surface, static_cast<int>(labels_.size()));
  labels_.push_back(label);
}

Gazetteer Gazetteer::Parse(std::string_view content) {
  Gazetteer gazetteer;
  std::size_t line_no = 0;
  for (const std::string& line : SplitLines(content)) {
    ++line_no;
    if (TrimView(line).empty() || line.front() == '#') continue;
    const std::size_t tab = line.rfind('\t');
    if (tab == std::string::npos) {
      throw ValidationError("gazetteer line " + std::to_string(line_no) +
                            ": expected surface<TAB>LABEL");
    }
    try {
      gazetteer.Add(line.substr(0, tab),
                    ParseEntityLabel(TrimView(std::string_view(line).substr(tab + 1))));
    } catch (const Error& e) {
      throw ValidationError("gazetteer line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return gazetteer;
}

Gazetteer Gazetteer::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

std::vector<EntitySpan> Gazetteer::Annotate(std::string_view sentence) const {
  const std::u32string original = utf8::Decode(sentence);
  const std::u32string folded = utf8::ToLower(std::u32string_view(original));
  const auto masks = MaskTokenRanges(original);
  std::vector<PhraseMatcher::Match> candidates;
  for (const auto& m : matcher_.FindAll(folded)) {
    const bool in_mask = std::any_of(masks.begin(), masks.end(), [&](auto r) {
      return m.start < r.second && r.first < m.end;
    });
    if (!in_mask) candidates.push_back(m);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    const int la = a.end - a.start;
    const int lb = b.end - b.start;
    if (la != lb) return la > lb;
    return a.start < b.start;
  });
  std::vector<PhraseMatcher::Match> accepted;
  for (const auto& c : candidates) {
    const bool overlaps = std::any_of(accepted.begin(), accepted.end(), [&](auto a) {
      return c.start < a.end && a.start < c.end;
    });
    if (!overlaps) accepted.push_back(c);
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<EntitySpan> spans;
  spans.reserve(accepted.size());
  for (const auto& a : accepted) {
    EntitySpan span;
    span.start = a.start;
    span.end = a.end;
    span.label = labels_[a.value];
    span.surface = utf8::Encode(
        std::u32string_view(original).substr(a.start, a.end - a.start));
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<EntitySpan> GazetteerAnnotate(
    std::span<const SentenceRecord> sentences, const Gazetteer& gazetteer) {
  std::vector<EntitySpan> spans;
  for (const SentenceRecord& s : sentences) {
    for (EntitySpan& span : gazetteer.Annotate(s.text)) {
      span.comment_id = s.comment_id;
      span.sentence_index = s.sentence_index;
      spans.push_back(std::move(span));
    }
  }
  return spans;
}

void ValidateSpan(const EntitySpan& span, std::string_view sentence) {
  const std::u32string cps = utf8::Decode(sentence);
  if (span.start < 0 || span.start >= span.end ||
      static_cast<std::size_t>(span.end) > cps.size()) {
    throw ValidationError("offsets [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end) +
                          ") out of range for sentence of length " +
                          std::to_string(cps.size()));
  }
  const std::string covered = utf8::Encode(
      std::u32string_view(cps).substr(span.start, span.end - span.start));
  if (covered != span.surface) {
    throw ValidationError("surface '" + span.surface +
                          "' does not match sentence text '" + covered +
                          "' at [" + std::to_string(span.start) + ", " +
                          std::to_string(span.end) + ")");
  }
}

ImportResult ParseAnnotations(std::string_view content,
                              std::span<const SentenceRecord> sentences) {
  std::map<SentenceKey, const SentenceRecord*> index;
  for (const SentenceRecord& s : sentences) {
    index[{s.comment_id, s.sentence_index}] = &s;
  }
  ImportResult result;
  std::size_t line_no = 0;
  for (const std::string& line : SplitLines(content)) {
    ++line_no;
    if (TrimView(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.rejected.push_back(where + "not a JSON object");
      continue;
    }
    EntitySpan span;
    try {
      span.comment_id = obj.at("comment_id").get<std::string>();
      span.sentence_index = obj.at("sentence_index").get<int>();
      span.start = obj.at("start").get<int>();
      span.end = obj.at("end").get<int>();
      span.label = ParseEntityLabel(obj.at("label").get<std::string>());
      span.surface = obj.at("surface").get<std::string>();
    } catch (const json::exception& e) {
      result.rejected.push_back(where + e.what());
      continue;
    } catch (const Error& e) {
      result.rejected.push_back(where + e.what());
      continue;
    }
    auto it = index.find({span.comment_id, span.sentence_index});
    if (it == index.end()) {
      result.rejected.push_back(where + "unknown sentence " + span.comment_id +
                                "#" + std::to_string(span.sentence_index));
      continue;
    }
    try {
      ValidateSpan(span, it->second->text);
    } catch (const Error& e) {
      result.rejected.push_back(where + e.what());
      continue;
    }
    result.spans.push_back(std::move(span));
  }
  return result;
}

ImportResult ImportAnnotations(const std::filesystem::path& path,
                               std::span<const SentenceRecord> sentences) {
  return ParseAnnotations(ReadFile(path), sentences);
}

std::string SerializeAnnotations(std::span<const EntitySpan> spans) {
  std::string out;
  for (const EntitySpan& s : spans) {
    json obj = {{"comment_id", s.comment_id},
                {"sentence_index", s.sentence_index},
                {"start", s.start},
                {"end", s.end},
                {"label", ToString(s.label)},
                {"surface", s.surface}};
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::string MaskSentence(std::string_view sentence,
                         std::span<const EntitySpan> spans) {
  std::vector<EntitySpan> ordered(spans.begin(), spans.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const EntitySpan& a, const EntitySpan& b) {
              return std::tie(a.start, a.end) < std::tie(b.start, b.end);
            });
  std::u32string cps = utf8::Decode(sentence);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const EntitySpan& s = ordered[i];
    if (s.start < 0 || s.start >= s.end ||
        static_cast<std::size_t>(s.end) > cps.size()) {
      throw ValidationError("span [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") outside sentence");
    }
    if (i > 0 && ordered[i - 1].end > s.start) {
      throw ValidationError("overlapping spans [" +
                            std::to_string(ordered[i - 1].start) + ", " +
                            std::to_string(ordered[i - 1].end) + ") and [" +
                            std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ")");
    }
  }
  // Right to left keeps the remaining offsets valid.
  for (auto it = ordered.rbegin(); it != ordered.rend(); ++it) {
    cps.replace(it->start, it->end - it->start, utf8::Decode(MaskToken(it->label)));
  }
  return utf8::Encode(cps);
}

std::vector<SentenceRecord> MaskSentences(
    std::span<const SentenceRecord> sentences,
    std::span<const EntitySpan> spans) {
  std::map<SentenceKey, std::vector<EntitySpan>> by_sentence;
  for (const EntitySpan& s : spans) {
    by_sentence[{s.comment_id, s.sentence_index}].push_back(s);
  }
  std::vector<SentenceRecord> out(sentences.begin(), sentences.end());
  for (SentenceRecord& r : out) {
    auto it = by_sentence.find({r.comment_id, r.sentence_index});
    if (it == by_sentence.end()) {
      r.masked_text = r.text;
      continue;
    }
    try {
      r.masked_text = MaskSentence(r.text, it->second);
    } catch (const Error& e) {
      throw ValidationError("sentence " + r.comment_id + "#" +
                            std::to_string(r.sentence_index) + ": " + e.what());
    }
  }
  return out;
}

std::string NormalizeSurface(std::string_view surface) {
  std::string_view trimmed = surface;
  while (!trimmed.empty() && utf8::IsWhitespace(static_cast<unsigned char>(trimmed.front()))) {
    trimmed.remove_prefix(1);
  }
  while (!trimmed.empty() && utf8::IsWhitespace(static_cast<unsigned char>(trimmed.back()))) {
    trimmed.remove_suffix(1);
  }
  return utf8::ToLower(trimmed);
}

FneList CountFne(std::span<const EntitySpan> spans,
                 const std::set<std::string>& known_comments,
                 const FneConfig& config) {
  config.Validate();
  std::set<std::string> excluded;
  for (const std::string& s : config.excluded_surfaces) {
    excluded.insert(NormalizeSurface(s));
  }
  using Key = std::pair<std::string, EntityLabel>;
  std::map<Key, std::set<std::string>> comments_by_entity;
  std::map<Key, std::map<std::string, int>> forms;
  for (const EntitySpan& s : spans) {
    if (!known_comments.contains(s.comment_id)) {
      throw ValidationError("span references unknown comment " + s.comment_id);
    }
    if (config.excluded_labels.contains(s.label)) continue;
    const std::string norm = NormalizeSurface(s.surface);
    if (norm.empty() || excluded.contains(norm)) continue;
    const Key key{norm, s.label};
    comments_by_entity[key].insert(s.comment_id);
    ++forms[key][std::string(TrimView(s.surface))];
  }
  struct Ranked {
    Key key;
    FneEntry entry;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(comments_by_entity.size());
  for (const auto& [key, ids] : comments_by_entity) {
    // Display the most frequent original spelling; ties go to the smallest.
    const auto& spellings = forms.at(key);
    auto best = spellings.begin();
    for (auto it = spellings.begin(); it != spellings.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    ranked.push_back(
        {key, FneEntry{best->first, key.second, static_cast<int>(ids.size())}});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.entry.count != b.entry.count) return a.entry.count > b.entry.count;
    return a.key < b.key;
  });
  FneList out;
  out.reserve(ranked.size());
  for (Ranked& r : ranked) out.push_back(std::move(r.entry));
  return out;
}

FneList TopFne(const FneList& ranked, int top_k) {
  if (top_k < 1) throw ValidationError("top_k must be >= 1");
  FneList out(ranked.begin(),
              ranked.begin() + std::min<std::size_t>(ranked.size(), top_k));
  return out;
}

std::vector<SentenceRecord> FilterByFne(
    std::span<const SentenceRecord> sentences, const FneList& fne) {
  if (fne.empty()) throw ValidationError("FNE list is empty");
  PhraseMatcher matcher;
  for (const FneEntry& e : fne) matcher.Add(e.surface, 0);
  std::vector<SentenceRecord> out;
  for (const SentenceRecord& s : sentences) {
    if (matcher.ContainsAny(s.text)) out.push_back(s);
  }
  return out;
}

std::string SerializeFneCsv(const FneList& fne) {
  std::string out = "surface,label,count\n";
  for (const FneEntry& e : fne) {
    out += CsvField(e.surface) + "," + std::string(ToString(e.label)) + "," +
           std::to_string(e.count) + "\n";
  }
  return out;
}

FneList ParseFneCsv(std::string_view content) {
  const auto rows = ParseCsv(content);
  if (rows.empty() || rows[0] != std::vector<std::string>{"surface", "label", "count"}) {
    throw ValidationError("FNE list must start with header surface,label,count");
  }
  FneList out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 3) {
      throw ValidationError("FNE row " + std::to_string(r) + ": expected 3 fields");
    }
    out.push_back({rows[r][0], ParseEntityLabel(rows[r][1]),
                   static_cast<int>(ParseInt(rows[r][2]))});
  }
  return out;
}

}  // namespace nemaudit
