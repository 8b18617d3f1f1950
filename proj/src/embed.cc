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

#include "nemaudit/embed.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <utility>

#include "json.hpp"
#include "nemaudit/digest.h"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/random.h"
#include "nemaudit/tokenizer.h"
#include "nemaudit/utf8.h"

namespace nemaudit {
namespace {

using nlohmann::json;

constexpr std::string_view kStoreMagic = "NEMAUDIT-EMB v1";

void Normalize(std::vector<double>* v) {
  double norm = 0.0;
  for (double x : *v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) return;
  for (double& x : *v) x /= norm;
}

const std::vector<std::string>& EmbedderSpecialTokens() {
  static const auto* tokens = [] {
    auto* t = new std::vector<std::string>{
        std::string(kClsToken), std::string(kSepToken), std::string(kUnkToken),
        std::string(kPadToken)};
    for (std::string& s : PipelineSpecialTokens()) t->push_back(std::move(s));
    return t;
  }();
  return *tokens;
}

// Parses "key=value" from the header, e.g. "dim=768".
long long HeaderField(std::string_view header, std::string_view key) {
  const std::string needle = std::string(key) + "=";
  for (std::string_view part : SplitOn(header, ' ')) {
    if (part.starts_with(needle)) return ParseInt(part.substr(needle.size()));
  }
  throw ValidationError("embedding store header lacks " + std::string(key));
}

}  // namespace

std::string_view ToString(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kPrecomputedStore:
      return "PrecomputedStore";
    case ProviderKind::kDeterministicTest:
      return "DeterministicTest";
    case ProviderKind::kExternalProcess:
      return "ExternalProcess";
  }
  return "DeterministicTest";
}

ProviderKind ParseProviderKind(std::string_view text) {
  for (ProviderKind kind :
       {ProviderKind::kPrecomputedStore, ProviderKind::kDeterministicTest,
        ProviderKind::kExternalProcess}) {
    if (ToString(kind) == text) return kind;
  }
  throw ValidationError("unknown provider kind '" + std::string(text) + "'");
}

std::vector<EmbeddingVector> EmbedBatch(EmbeddingProvider& provider,
                                        std::span<const std::string> sentences) {
  if (sentences.empty()) throw ValidationError("embed_batch needs sentences");
  std::vector<EmbeddingVector> out = provider.EmbedBatch(sentences);
  if (out.size() != sentences.size()) {
    throw ValidationError("provider returned " + std::to_string(out.size()) +
                          " vectors for " + std::to_string(sentences.size()) +
                          " sentences");
  }
  const auto dim = static_cast<std::size_t>(provider.descriptor().dim);
  for (const EmbeddingVector& v : out) {
    if (v.dim() != dim) {
      throw ValidationError("provider returned a vector of length " +
                            std::to_string(v.dim()) + ", expected " +
                            std::to_string(dim));
    }
    for (double x : v.values) {
      if (!std::isfinite(x)) throw ValidationError("provider returned non-finite value");
    }
  }
  return out;
}

std::string SentenceDigest(std::string_view sentence) {
  return Hex64(Fnv1a64(sentence));
}

EmbeddingStore::EmbeddingStore(int dim) : dim_(dim) {
  if (dim < 1) throw ValidationError("embedding dim must be >= 1");
}

void EmbeddingStore::Insert(std::string_view sentence,
                            const EmbeddingVector& vector) {
  InsertDigest(SentenceDigest(sentence), vector);
}

void EmbeddingStore::InsertDigest(const std::string& digest,
                                  const EmbeddingVector& vector) {
  if (vector.dim() != static_cast<std::size_t>(dim_)) {
    throw ValidationError("vector for " + digest + " has length " +
                          std::to_string(vector.dim()) + ", store dim is " +
                          std::to_string(dim_));
  }
  for (double x : vector.values) {
    if (!std::isfinite(x)) throw ValidationError("non-finite value for " + digest);
  }
  auto [it, inserted] = vectors_.emplace(digest, vector);
  if (!inserted && it->second != vector) {
    throw ValidationError("digest " + digest +
                          " already stored with a different vector");
  }
}

const EmbeddingVector* EmbeddingStore::Find(std::string_view sentence) const {
  return FindDigest(SentenceDigest(sentence));
}

const EmbeddingVector* EmbeddingStore::FindDigest(const std::string& digest) const {
  auto it = vectors_.find(digest);
  return it == vectors_.end() ? nullptr : &it->second;
}

std::string EmbeddingStore::Serialize() const {
  std::string out = std::string(kStoreMagic) + " dim=" + std::to_string(dim_) +
                    " count=" + std::to_string(vectors_.size()) + "\n";
  for (const auto& [digest, vector] : vectors_) {
    out += digest;
    out += '\t';
    for (std::size_t i = 0; i < vector.values.size(); ++i) {
      if (i > 0) out += ' ';
      out += FormatDouble(vector.values[i]);
    }
    out += '\n';
  }
  return out;
}

EmbeddingStore EmbeddingStore::Parse(std::string_view content) {
  const std::vector<std::string> lines = SplitLines(content);
  if (lines.empty() || !lines[0].starts_with(kStoreMagic)) {
    throw ValidationError("not an embedding store (missing '" +
                          std::string(kStoreMagic) + "' header)");
  }
  const long long dim = HeaderField(lines[0], "dim");
  const long long count = HeaderField(lines[0], "count");
  if (dim < 1 || count < 0) throw ValidationError("bad embedding store header");
  if (static_cast<long long>(lines.size()) - 1 != count) {
    throw ValidationError("embedding store declares " + std::to_string(count) +
                          " vectors but has " + std::to_string(lines.size() - 1));
  }
  EmbeddingStore store(static_cast<int>(dim));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    const std::size_t tab = line.find('\t');
    if (tab != 16) {
      throw ValidationError("embedding store line " + std::to_string(i + 1) +
                            ": expected 16 hex digit digest and a tab");
    }
    EmbeddingVector v;
    v.values.reserve(static_cast<std::size_t>(dim));
    for (std::string_view field :
         SplitOn(std::string_view(line).substr(tab + 1), ' ')) {
      v.values.push_back(ParseDouble(field));
    }
    store.InsertDigest(line.substr(0, tab), v);
  }
  if (static_cast<long long>(store.size()) != count) {
    throw ValidationError("embedding store has duplicate digests");
  }
  return store;
}

EmbeddingStore EmbeddingStore::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

EmbeddingStore BuildStore(std::span<const std::string> sentences,
                          std::span<const EmbeddingVector> vectors, int dim) {
  if (sentences.size() != vectors.size()) {
    throw ValidationError("build_store: " + std::to_string(sentences.size()) +
                          " sentences but " + std::to_string(vectors.size()) +
                          " vectors");
  }
  EmbeddingStore store(dim);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    store.Insert(sentences[i], vectors[i]);
  }
  return store;
}

void BuildStore(std::span<const std::string> sentences,
                std::span<const EmbeddingVector> vectors,
                const std::filesystem::path& path) {
  if (vectors.empty()) throw ValidationError("build_store: no vectors");
  const int dim = static_cast<int>(vectors.front().dim());
  WriteFile(path, BuildStore(sentences, vectors, dim).Serialize());
}

PrecomputedStoreProvider::PrecomputedStoreProvider(EmbeddingStore store,
                                                   std::string identity)
    : store_(std::move(store)),
      descriptor_{ProviderKind::kPrecomputedStore, store_.dim(),
                  std::move(identity)} {}

std::vector<EmbeddingVector> PrecomputedStoreProvider::EmbedBatch(
    std::span<const std::string> sentences) {
  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  for (const std::string& s : sentences) {
    const std::string digest = SentenceDigest(s);
    const EmbeddingVector* v = store_.FindDigest(digest);
    if (v == nullptr) {
      throw ValidationError("embedding store has no vector for sentence digest " +
                            digest + " (\"" + s + "\")");
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<double> HashedUnitVector(std::string_view token, std::uint64_t seed,
                                     int dim) {
  Rng rng(Mix64(seed ^ Fnv1a64(token)));
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rng.Gaussian();
  Normalize(&v);
  return v;
}

DeterministicTestEmbedder::DeterministicTestEmbedder(std::uint64_t seed, int dim)
    : seed_(seed),
      dim_(dim),
      descriptor_{ProviderKind::kDeterministicTest, dim,
                  "deterministic-test:seed=" + std::to_string(seed)} {
  if (dim < 1) throw ValidationError("embedding dim must be >= 1");
}

const std::vector<double>& DeterministicTestEmbedder::TokenVector(
    const std::string& token) {
  auto it = cache_.find(token);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(token, HashedUnitVector(token, seed_, dim_)).first->second;
}

EmbeddingVector DeterministicTestEmbedder::Embed(std::string_view sentence) {
  static const TokenizerConfig kConfig;
  const std::vector<std::string> tokens =
      BasicTokenize(sentence, kConfig, EmbedderSpecialTokens());
  std::lock_guard<std::mutex> lock(mu_);
  if (tokens.empty()) return {TokenVector("")};
  EmbeddingVector out{std::vector<double>(static_cast<std::size_t>(dim_), 0.0)};
  for (const std::string& token : tokens) {
    const std::vector<double>& tv = TokenVector(token);
    for (std::size_t i = 0; i < tv.size(); ++i) out.values[i] += tv[i];
  }
  double norm = 0.0;
  for (double x : out.values) norm += x * x;
  if (norm == 0.0) return {TokenVector("")};
  Normalize(&out.values);
  return out;
}

std::vector<EmbeddingVector> DeterministicTestEmbedder::EmbedBatch(
    std::span<const std::string> sentences) {
  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  for (const std::string& s : sentences) out.push_back(Embed(s));
  return out;
}

EmbeddingVector DeterministicTestEmbed(std::string_view sentence,
                                       std::uint64_t seed, int dim) {
  DeterministicTestEmbedder embedder(seed, dim);
  return embedder.Embed(sentence);
}

ExternalProcessProvider::ExternalProcessProvider(std::vector<std::string> argv,
                                                 int dim) {
  if (argv.empty()) throw ValidationError("external provider needs a command");
  if (dim < 1) throw ValidationError("embedding dim must be >= 1");
  std::string identity;
  for (const std::string& a : argv) {
    if (!identity.empty()) identity += ' ';
    identity += a;
  }
  descriptor_ = {ProviderKind::kExternalProcess, dim, identity};

  // A dead child must surface as an error, not kill us on write.
  ::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw IoError("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw IoError("pipe failed");
  }
  std::vector<char*> args;
  for (std::string& a : argv) args.push_back(a.data());
  args.push_back(nullptr);
  const pid_t pid = ::fork();
  if (pid < 0) throw IoError("fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalProcessProvider::~ExternalProcessProvider() { Shutdown(); }

void ExternalProcessProvider::Shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::string ExternalProcessProvider::ReadLine() {
  while (true) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      throw IoError("embedding process '" + descriptor_.identity +
                    "' closed its output" +
                    (buffer_.empty() ? "" : " after partial line: " + buffer_));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

EmbeddingVector ExternalProcessProvider::Request(const std::string& text) {
  const std::int64_t id = next_id_++;
  std::string request =
      json{{"id", id}, {"text", text}}.dump(-1, ' ', false,
                                            json::error_handler_t::replace);
  request += '\n';
  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t n =
        ::write(to_child_, request.data() + written, request.size() - written);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      throw IoError("cannot write to embedding process '" +
                    descriptor_.identity + "': " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  const std::string line = ReadLine();
  json response = json::parse(line, nullptr, false);
  auto violation = [&](const std::string& what) {
    return ValidationError("embedding process protocol violation (" + what +
                           "): " + line);
  };
  if (response.is_discarded() || !response.is_object()) {
    throw violation("not a JSON object");
  }
  auto id_it = response.find("id");
  if (id_it == response.end() || !id_it->is_number_integer() ||
      id_it->get<std::int64_t>() != id) {
    throw violation("expected id " + std::to_string(id));
  }
  if (auto err = response.find("error"); err != response.end()) {
    throw ValidationError("embedding process reported error for id " +
                          std::to_string(id) + ": " +
                          (err->is_string() ? err->get<std::string>() : err->dump()));
  }
  auto vec = response.find("vector");
  if (vec == response.end() || !vec->is_array()) throw violation("missing vector");
  if (vec->size() != static_cast<std::size_t>(descriptor_.dim)) {
    throw violation("vector length " + std::to_string(vec->size()) +
                    ", expected " + std::to_string(descriptor_.dim));
  }
  EmbeddingVector out;
  out.values.reserve(vec->size());
  for (const json& x : *vec) {
    if (!x.is_number()) throw violation("non-numeric vector entry");
    const double value = x.get<double>();
    if (!std::isfinite(value)) throw violation("non-finite vector entry");
    out.values.push_back(value);
  }
  return out;
}

std::vector<EmbeddingVector> ExternalProcessProvider::EmbedBatch(
    std::span<const std::string> sentences) {
  std::lock_guard<std::mutex> lock(mu_);
  if (pid_ < 0) throw IoError("embedding process is not running");
  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  for (const std::string& s : sentences) out.push_back(Request(s));
  return out;
}

}  // namespace nemaudit
