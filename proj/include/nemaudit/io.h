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

#ifndef NEMAUDIT_IO_H_
#define NEMAUDIT_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nemaudit {

// Throws Error(kIo) when the file cannot be read.
std::string ReadFile(const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place, creating
// parent directories as needed.
void WriteFile(const std::filesystem::path& path, std::string_view content);

// Splits on '\n'; a trailing '\r' is dropped from each line and a final empty
// line is not reported.
std::vector<std::string> SplitLines(std::string_view content);

// Shortest decimal text that parses back to the identical double.
std::string FormatDouble(double value);

// Strict parse of a complete token; throws Error(kValidation) otherwise.
double ParseDouble(std::string_view text);
long long ParseInt(std::string_view text);

std::vector<std::string_view> SplitOn(std::string_view text, char sep);

}  // namespace nemaudit

#endif  // NEMAUDIT_IO_H_
