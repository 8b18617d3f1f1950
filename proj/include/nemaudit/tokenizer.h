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

#ifndef NEMAUDIT_TOKENIZER_H_
#define NEMAUDIT_TOKENIZER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nemaudit {

struct TokenizerConfig {
  int max_seq_len = 128;
  int max_chars_per_word = 100;
  bool lowercase = true;

  void Validate() const;
};

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kPadToken = "[PAD]";

// "[URL]" plus one mask token per entity label.
std::vector<std::string> PipelineSpecialTokens();

// WordPiece vocabulary. Ids are dense and equal to the line number in the
// vocabulary file. Continuation pieces carry a "##" prefix.
class Vocab {
 public:
  // Requires [CLS], [SEP], [UNK] and [PAD]; rejects duplicates and empty
  // entries. Registers the pipeline special tokens, appending any that are
  // missing.
  static Vocab FromTokens(std::vector<std::string> tokens);
  static Vocab Parse(std::string_view content);
  static Vocab Load(const std::filesystem::path& path);

  // Marks a token as unsplittable, adding it with the next free id if absent.
  void RegisterSpecial(const std::string& token);

  std::optional<std::int32_t> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }
  std::int32_t IdOf(std::string_view token) const;
  const std::string& TokenOf(std::int32_t id) const;
  std::size_t size() const { return tokens_.size(); }

  std::int32_t cls_id() const { return cls_id_; }
  std::int32_t sep_id() const { return sep_id_; }
  std::int32_t unk_id() const { return unk_id_; }
  std::int32_t pad_id() const { return pad_id_; }

  const std::vector<std::string>& special_tokens() const { return specials_; }
  bool IsSpecial(std::string_view token) const;

 private:
  Vocab() = default;

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> specials_;
  std::int32_t cls_id_ = 0;
  std::int32_t sep_id_ = 0;
  std::int32_t unk_id_ = 0;
  std::int32_t pad_id_ = 0;
};

// Splits on whitespace and around every punctuation character after removing
// control characters and U+FFFD. Occurrences of `special_tokens` are matched
// before lowercasing and emitted verbatim.
std::vector<std::string> BasicTokenize(
    std::string_view text, const TokenizerConfig& config,
    std::span<const std::string> special_tokens);

// Greedy longest-match-first subword split of one basic token. Words longer
// than max_chars_per_word code points, or with an unmatched position, become
// a single [UNK].
std::vector<std::string> WordPiece(std::string_view token, const Vocab& vocab,
                                   int max_chars_per_word);

class Tokenizer {
 public:
  Tokenizer(Vocab vocab, TokenizerConfig config);

  // Basic tokenization followed by WordPiece; special tokens are kept whole.
  std::vector<std::string> Tokenize(std::string_view text) const;

  // [CLS] + at most max_seq_len - 2 subtoken ids + [SEP]. Never pads.
  std::vector<std::int32_t> Encode(std::string_view sentence) const;

  const Vocab& vocab() const { return vocab_; }
  const TokenizerConfig& config() const { return config_; }

 private:
  Vocab vocab_;
  TokenizerConfig config_;
};

}  // namespace nemaudit

#endif  // NEMAUDIT_TOKENIZER_H_
