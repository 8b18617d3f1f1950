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

#ifndef NEMAUDIT_MODEL_H_
#define NEMAUDIT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nemaudit {

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 0.01;
  int epochs = 10;
  std::uint64_t seed = 0;
  double threshold = 0.5;
  // Reshuffle the batch order each epoch. Off gives a fixed schedule.
  bool shuffle = true;

  void Validate() const;
};

// Non-owning view of one training example.
struct Example {
  std::span<const double> features;
  int label = 0;
};

struct ModelMetadata {
  std::uint64_t seed = 0;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::string provider_identity;

  bool operator==(const ModelMetadata&) const = default;
};

double Sigmoid(double z);

// Logistic regression: p(y = 1 | x) = sigmoid(w.x + b).
class LinearClassifier {
 public:
  LinearClassifier(std::vector<double> weights, double bias,
                   ModelMetadata metadata = {});

  double Logit(std::span<const double> x) const;
  double PredictProba(std::span<const double> x) const;
  // 1 iff PredictProba(x) >= threshold.
  int Classify(std::span<const double> x, double threshold) const;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  std::size_t dim() const { return weights_.size(); }
  const ModelMetadata& metadata() const { return metadata_; }

  // Line 1 "NEMAUDIT-MODEL v1 dim=<d>", line 2 bias, line 3 weights, line 4
  // metadata JSON. Numbers use shortest round-trip decimal text.
  std::string Serialize() const;
  static LinearClassifier Parse(std::string_view content);
  void Save(const std::filesystem::path& path) const;
  static LinearClassifier Load(const std::filesystem::path& path);

 private:
  void CheckDim(std::span<const double> x) const;

  std::vector<double> weights_;
  double bias_;
  ModelMetadata metadata_;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

// Mean binary cross-entropy over the batch and its exact gradient.
LossGradient MeanLossAndGradient(std::span<const double> weights, double bias,
                                 std::span<const Example> batch);

// Mini-batch gradient descent from zero weights. Requires both classes and a
// uniform feature dimension. Deterministic for a fixed seed.
LinearClassifier Train(std::span<const Example> examples,
                       const TrainConfig& config,
                       const std::string& provider_identity = "");

// Indices of a 1:1 sample: every example of the smaller class plus an equally
// sized seeded draw from the larger one, in ascending index order.
std::vector<std::size_t> BalancedSample(std::span<const int> labels,
                                        std::uint64_t seed);

}  // namespace nemaudit

#endif  // NEMAUDIT_MODEL_H_
