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

#ifndef NEMAUDIT_UTF8_H_
#define NEMAUDIT_UTF8_H_

#include <cstddef>
#include <string>
#include <string_view>

namespace nemaudit::utf8 {

// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD, one per
// offending byte.
std::u32string Decode(std::string_view text);
std::string Encode(std::u32string_view text);
void Append(char32_t cp, std::string* out);

// Number of code points Decode produces.
std::size_t Length(std::string_view text);

// Character classes. These cover ASCII, Latin-1, Latin Extended-A, Greek,
// Cyrillic and the general punctuation block; everything else above U+007F is
// treated as a letter.
bool IsWhitespace(char32_t cp);
bool IsControl(char32_t cp);
bool IsPunctuation(char32_t cp);
bool IsUpper(char32_t cp);
bool IsDigit(char32_t cp);
bool IsWordChar(char32_t cp);

// One-to-one case mapping so that code point offsets survive lowercasing.
char32_t ToLower(char32_t cp);
std::u32string ToLower(std::u32string_view text);
std::string ToLower(std::string_view text);

}  // namespace nemaudit::utf8

#endif  // NEMAUDIT_UTF8_H_
