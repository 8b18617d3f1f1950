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

#ifndef NEMAUDIT_EMBED_H_
#define NEMAUDIT_EMBED_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nemaudit {

inline constexpr int kDefaultEmbeddingDim = 768;

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

enum class ProviderKind { kPrecomputedStore, kDeterministicTest, kExternalProcess };

std::string_view ToString(ProviderKind kind);
ProviderKind ParseProviderKind(std::string_view text);

struct ProviderDescriptor {
  ProviderKind kind = ProviderKind::kDeterministicTest;
  int dim = kDefaultEmbeddingDim;
  // Model name, seed or command line; recorded with trained models.
  std::string identity;
};

// Maps sentences to fixed-length vectors. Implementations are stateless with
// respect to their inputs: splitting a batch never changes the vectors.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual const ProviderDescriptor& descriptor() const = 0;
  virtual std::vector<EmbeddingVector> EmbedBatch(
      std::span<const std::string> sentences) = 0;
};

// Checked entry point: rejects empty batches and verifies the count, length
// and finiteness of what the provider returned.
std::vector<EmbeddingVector> EmbedBatch(EmbeddingProvider& provider,
                                        std::span<const std::string> sentences);

// Store key: 64-bit FNV-1a of the exact sentence bytes, as 16 hex digits.
std::string SentenceDigest(std::string_view sentence);

class EmbeddingStore {
 public:
  explicit EmbeddingStore(int dim);

  // Identical re-insertions are ignored; a different vector under an existing
  // digest is an error, as is a dimension mismatch.
  void Insert(std::string_view sentence, const EmbeddingVector& vector);
  void InsertDigest(const std::string& digest, const EmbeddingVector& vector);

  const EmbeddingVector* Find(std::string_view sentence) const;
  const EmbeddingVector* FindDigest(const std::string& digest) const;

  int dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  // Header "NEMAUDIT-EMB v1 dim=<d> count=<n>", then one
  // "digest<TAB>v1 v2 ..." line per entry in digest order.
  std::string Serialize() const;
  static EmbeddingStore Parse(std::string_view content);
  static EmbeddingStore Load(const std::filesystem::path& path);

  bool operator==(const EmbeddingStore&) const = default;

 private:
  int dim_;
  std::map<std::string, EmbeddingVector> vectors_;
};

EmbeddingStore BuildStore(std::span<const std::string> sentences,
                          std::span<const EmbeddingVector> vectors, int dim);
void BuildStore(std::span<const std::string> sentences,
                std::span<const EmbeddingVector> vectors,
                const std::filesystem::path& path);

class PrecomputedStoreProvider : public EmbeddingProvider {
 public:
  PrecomputedStoreProvider(EmbeddingStore store, std::string identity);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  // Throws on the first sentence missing from the store, naming its digest.
  std::vector<EmbeddingVector> EmbedBatch(
      std::span<const std::string> sentences) override;

 private:
  EmbeddingStore store_;
  ProviderDescriptor descriptor_;
};

// Bag-of-tokens stand-in for a sentence encoder. Each basic token hashes
// (with the seed) to a pseudo-random unit vector; a sentence is the
// normalized sum of its token vectors. Token order is irrelevant, and
// replacing a token moves the embedding.
class DeterministicTestEmbedder : public EmbeddingProvider {
 public:
  DeterministicTestEmbedder(std::uint64_t seed, int dim);

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  std::vector<EmbeddingVector> EmbedBatch(
      std::span<const std::string> sentences) override;

  EmbeddingVector Embed(std::string_view sentence);

 private:
  const std::vector<double>& TokenVector(const std::string& token);

  std::uint64_t seed_;
  int dim_;
  ProviderDescriptor descriptor_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> cache_;
};

EmbeddingVector DeterministicTestEmbed(std::string_view sentence,
                                       std::uint64_t seed, int dim);

// Unit vector derived from (seed, token). Exposed for tests.
std::vector<double> HashedUnitVector(std::string_view token, std::uint64_t seed,
                                     int dim);

// Talks to a child process over its stdin/stdout, one JSON request and one
// JSON response per line:
//   -> {"id": 0, "text": "..."}
//   <- {"id": 0, "vector": [...]}   or   {"id": 0, "error": "..."}
// Single client: requests are sent one at a time.
class ExternalProcessProvider : public EmbeddingProvider {
 public:
  ExternalProcessProvider(std::vector<std::string> argv, int dim);
  ~ExternalProcessProvider() override;

  ExternalProcessProvider(const ExternalProcessProvider&) = delete;
  ExternalProcessProvider& operator=(const ExternalProcessProvider&) = delete;

  const ProviderDescriptor& descriptor() const override { return descriptor_; }
  std::vector<EmbeddingVector> EmbedBatch(
      std::span<const std::string> sentences) override;

 private:
  EmbeddingVector Request(const std::string& text);
  std::string ReadLine();
  void Shutdown();

  ProviderDescriptor descriptor_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 0;
  std::mutex mu_;
};

}  // namespace nemaudit

#endif  // NEMAUDIT_EMBED_H_
