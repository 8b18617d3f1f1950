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

#include "nemaudit/tokenizer.h"

#include <algorithm>
#include <utility>

#include "nemaudit/entity_label.h"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/utf8.h"

namespace nemaudit {

void TokenizerConfig::Validate() const {
  if (max_seq_len < 3) throw ValidationError("max_seq_len must be >= 3");
  if (max_chars_per_word < 1) {
    throw ValidationError("max_chars_per_word must be >= 1");
  }
}

std::vector<std::string> PipelineSpecialTokens() {
  std::vector<std::string> tokens = {"[URL]"};
  for (EntityLabel label : kAllEntityLabels) tokens.push_back(MaskToken(label));
  return tokens;
}

Vocab Vocab::FromTokens(std::vector<std::string> tokens) {
  Vocab vocab;
  vocab.tokens_ = std::move(tokens);
  vocab.ids_.reserve(vocab.tokens_.size());
  for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
    const std::string& token = vocab.tokens_[i];
    if (token.empty()) {
      throw ValidationError("empty vocabulary entry at id " + std::to_string(i));
    }
    auto [it, inserted] =
        vocab.ids_.emplace(token, static_cast<std::int32_t>(i));
    if (!inserted) {
      throw ValidationError("duplicate vocabulary entry '" + token + "' at id " +
                            std::to_string(i));
    }
  }
  for (std::string_view required : {kClsToken, kSepToken, kUnkToken, kPadToken}) {
    if (!vocab.Contains(required)) {
      throw ValidationError("vocabulary lacks " + std::string(required));
    }
    vocab.specials_.emplace_back(required);
  }
  vocab.cls_id_ = vocab.IdOf(kClsToken);
  vocab.sep_id_ = vocab.IdOf(kSepToken);
  vocab.unk_id_ = vocab.IdOf(kUnkToken);
  vocab.pad_id_ = vocab.IdOf(kPadToken);
  for (const std::string& token : PipelineSpecialTokens()) {
    vocab.RegisterSpecial(token);
  }
  return vocab;
}

Vocab Vocab::Parse(std::string_view content) {
  return FromTokens(SplitLines(content));
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

void Vocab::RegisterSpecial(const std::string& token) {
  if (token.empty()) throw ValidationError("empty special token");
  if (!Contains(token)) {
    ids_.emplace(token, static_cast<std::int32_t>(tokens_.size()));
    tokens_.push_back(token);
  }
  if (!IsSpecial(token)) specials_.push_back(token);
}

std::optional<std::int32_t> Vocab::Find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::int32_t Vocab::IdOf(std::string_view token) const {
  auto id = Find(token);
  if (!id) throw ValidationError("token not in vocabulary: " + std::string(token));
  return *id;
}

const std::string& Vocab::TokenOf(std::int32_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw ValidationError("token id out of range: " + std::to_string(id));
  }
  return tokens_[id];
}

bool Vocab::IsSpecial(std::string_view token) const {
  return std::find(specials_.begin(), specials_.end(), token) != specials_.end();
}

std::vector<std::string> BasicTokenize(
    std::string_view text, const TokenizerConfig& config,
    std::span<const std::string> special_tokens) {
  std::vector<std::u32string> specials;
  specials.reserve(special_tokens.size());
  for (const std::string& s : special_tokens) {
    if (!s.empty()) specials.push_back(utf8::Decode(s));
  }
  // Longest first, so "[URL]" never loses to a hypothetical "[U".
  std::sort(specials.begin(), specials.end(),
            [](const std::u32string& a, const std::u32string& b) {
              return a.size() > b.size();
            });

  const std::u32string cps = utf8::Decode(text);
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    bool matched = false;
    for (const std::u32string& s : specials) {
      if (cps.compare(i, s.size(), s) == 0) {
        flush();
        tokens.push_back(utf8::Encode(s));
        i += s.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    const char32_t cp = cps[i++];
    if (cp == 0 || cp == 0xFFFD || utf8::IsControl(cp)) continue;
    if (utf8::IsWhitespace(cp)) {
      flush();
    } else if (utf8::IsPunctuation(cp)) {
      flush();
      std::string punct;
      utf8::Append(cp, &punct);
      tokens.push_back(std::move(punct));
    } else {
      utf8::Append(config.lowercase ? utf8::ToLower(cp) : cp, &word);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> WordPiece(std::string_view token, const Vocab& vocab,
                                   int max_chars_per_word) {
  const std::u32string cps = utf8::Decode(token);
  if (cps.size() > static_cast<std::size_t>(max_chars_per_word)) {
    return {std::string(kUnkToken)};
  }
  std::vector<std::string> pieces;
  std::size_t start = 0;
  while (start < cps.size()) {
    std::size_t end = cps.size();
    std::string found;
    while (start < end) {
      std::string candidate = start > 0 ? "##" : "";
      candidate += utf8::Encode(std::u32string_view(cps).substr(start, end - start));
      if (vocab.Contains(candidate)) {
        found = std::move(candidate);
        break;
      }
      --end;
    }
    if (found.empty()) return {std::string(kUnkToken)};
    pieces.push_back(std::move(found));
    start = end;
  }
  return pieces;
}

Tokenizer::Tokenizer(Vocab vocab, TokenizerConfig config)
    : vocab_(std::move(vocab)), config_(config) {
  config_.Validate();
}

std::vector<std::string> Tokenizer::Tokenize(std::string_view text) const {
  std::vector<std::string> out;
  for (std::string& token :
       BasicTokenize(text, config_, vocab_.special_tokens())) {
    if (vocab_.IsSpecial(token)) {
      out.push_back(std::move(token));
      continue;
    }
    for (std::string& piece :
         WordPiece(token, vocab_, config_.max_chars_per_word)) {
      out.push_back(std::move(piece));
    }
  }
  return out;
}

std::vector<std::int32_t> Tokenizer::Encode(std::string_view sentence) const {
  const std::vector<std::string> pieces = Tokenize(sentence);
  const std::size_t budget = static_cast<std::size_t>(config_.max_seq_len) - 2;
  std::vector<std::int32_t> ids;
  ids.reserve(std::min(pieces.size(), budget) + 2);
  ids.push_back(vocab_.cls_id());
  for (std::size_t i = 0; i < pieces.size() && i < budget; ++i) {
    ids.push_back(vocab_.IdOf(pieces[i]));
  }
  ids.push_back(vocab_.sep_id());
  return ids;
}

}  // namespace nemaudit
