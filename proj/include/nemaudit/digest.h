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

#ifndef NEMAUDIT_DIGEST_H_
#define NEMAUDIT_DIGEST_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace nemaudit {

// 64-bit FNV-1a over the raw bytes.
std::uint64_t Fnv1a64(std::string_view data);

// Lowercase, zero-padded 16 character hex rendering.
std::string Hex64(std::uint64_t value);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view data);
std::string Sha256File(const std::filesystem::path& path);

// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t Mix64(std::uint64_t x);

// Seed for one (repetition, fold) cell of a repeated cross-validation run.
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t rep,
                         std::uint64_t fold);

}  // namespace nemaudit

#endif  // NEMAUDIT_DIGEST_H_
