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

#include "nemaudit/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "json.hpp"
#include "nemaudit/error.h"
#include "nemaudit/io.h"
#include "nemaudit/random.h"

namespace nemaudit {
namespace {

using nlohmann::json;

constexpr std::string_view kModelMagic = "NEMAUDIT-MODEL";
constexpr std::string_view kModelVersion = "v1";

// Four fixed partial sums; the summation order is part of the model's
// bit-level reproducibility.
double Dot(std::span<const double> a, std::span<const double> b) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < a.size(); ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

void Accumulate(std::span<const double> weights, double bias,
                std::span<const Example> batch, LossGradient* out) {
  out->grad_weights.assign(weights.size(), 0.0);
  out->grad_bias = 0.0;
  out->loss = 0.0;
  for (const Example& e : batch) {
    const double z = Dot(weights, e.features) + bias;
    out->loss += Softplus(z) - e.label * z;
    const double residual = Sigmoid(z) - e.label;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      out->grad_weights[i] += residual * e.features[i];
    }
    out->grad_bias += residual;
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  out->loss *= scale;
  out->grad_bias *= scale;
  for (double& g : out->grad_weights) g *= scale;
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold must lie in (0, 1)");
  }
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LinearClassifier::LinearClassifier(std::vector<double> weights, double bias,
                                   ModelMetadata metadata)
    : weights_(std::move(weights)), bias_(bias), metadata_(std::move(metadata)) {
  if (weights_.empty()) throw ValidationError("classifier needs dim >= 1");
  if (!std::isfinite(bias_) ||
      !std::all_of(weights_.begin(), weights_.end(),
                   [](double w) { return std::isfinite(w); })) {
    throw ValidationError("classifier parameters must be finite");
  }
}

void LinearClassifier::CheckDim(std::span<const double> x) const {
  if (x.size() != weights_.size()) {
    throw ValidationError("input dim " + std::to_string(x.size()) +
                          " does not match model dim " +
                          std::to_string(weights_.size()));
  }
}

double LinearClassifier::Logit(std::span<const double> x) const {
  CheckDim(x);
  return Dot(weights_, x) + bias_;
}

double LinearClassifier::PredictProba(std::span<const double> x) const {
  return Sigmoid(Logit(x));
}

int LinearClassifier::Classify(std::span<const double> x, double threshold) const {
  return PredictProba(x) >= threshold ? 1 : 0;
}

std::string LinearClassifier::Serialize() const {
  std::string out = std::string(kModelMagic) + " " + std::string(kModelVersion) +
                    " dim=" + std::to_string(weights_.size()) + "\n";
  out += FormatDouble(bias_) + "\n";
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (i > 0) out += ' ';
    out += FormatDouble(weights_[i]);
  }
  out += '\n';
  const json meta = {{"seed", metadata_.seed},
                     {"epochs", metadata_.epochs},
                     {"batch_size", metadata_.batch_size},
                     {"learning_rate", metadata_.learning_rate},
                     {"provider_identity", metadata_.provider_identity}};
  out += meta.dump() + "\n";
  return out;
}

LinearClassifier LinearClassifier::Parse(std::string_view content) {
  const std::vector<std::string> lines = SplitLines(content);
  if (lines.size() < 4) {
    throw ValidationError("model file truncated: expected 4 lines, found " +
                          std::to_string(lines.size()));
  }
  const auto header = SplitOn(lines[0], ' ');
  if (header.size() != 3 || header[0] != kModelMagic) {
    throw ValidationError("not a model file: '" + lines[0] + "'");
  }
  if (header[1] != kModelVersion) {
    throw ValidationError("unsupported model version '" + std::string(header[1]) +
                          "'");
  }
  if (!header[2].starts_with("dim=")) {
    throw ValidationError("model header lacks dim");
  }
  const long long dim = ParseInt(header[2].substr(4));
  const double bias = ParseDouble(lines[1]);
  std::vector<double> weights;
  for (std::string_view field : SplitOn(lines[2], ' ')) {
    weights.push_back(ParseDouble(field));
  }
  if (static_cast<long long>(weights.size()) != dim) {
    throw ValidationError("model header says dim=" + std::to_string(dim) +
                          " but line 3 has " + std::to_string(weights.size()) +
                          " weights");
  }
  json meta = json::parse(lines[3], nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) {
    throw ValidationError("model metadata is not a JSON object");
  }
  ModelMetadata metadata;
  try {
    metadata.seed = meta.at("seed").get<std::uint64_t>();
    metadata.epochs = meta.at("epochs").get<int>();
    metadata.batch_size = meta.at("batch_size").get<int>();
    metadata.learning_rate = meta.at("learning_rate").get<double>();
    metadata.provider_identity = meta.at("provider_identity").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model metadata: ") + e.what());
  }
  return LinearClassifier(std::move(weights), bias, std::move(metadata));
}

void LinearClassifier::Save(const std::filesystem::path& path) const {
  WriteFile(path, Serialize());
}

LinearClassifier LinearClassifier::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path));
}

LossGradient MeanLossAndGradient(std::span<const double> weights, double bias,
                                 std::span<const Example> batch) {
  if (batch.empty()) throw ValidationError("empty batch");
  for (const Example& e : batch) {
    if (e.features.size() != weights.size()) {
      throw ValidationError("example dim does not match weights");
    }
  }
  LossGradient out;
  Accumulate(weights, bias, batch, &out);
  return out;
}

LinearClassifier Train(std::span<const Example> examples,
                       const TrainConfig& config,
                       const std::string& provider_identity) {
  config.Validate();
  if (examples.empty()) throw ValidationError("no training examples");
  const std::size_t dim = examples.front().features.size();
  if (dim == 0) throw ValidationError("training examples have dim 0");
  bool has_pos = false;
  bool has_neg = false;
  for (const Example& e : examples) {
    if (e.features.size() != dim) {
      throw ValidationError("training examples have mixed dims (" +
                            std::to_string(dim) + " and " +
                            std::to_string(e.features.size()) + ")");
    }
    if (e.label != 0 && e.label != 1) throw ValidationError("labels must be 0 or 1");
    (e.label == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw ValidationError("training data must contain both classes");
  }

  std::vector<double> weights(dim, 0.0);
  double bias = 0.0;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(config.seed);
  std::vector<Example> batch;
  batch.reserve(static_cast<std::size_t>(config.batch_size));
  LossGradient step;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) rng.Shuffle(&order);
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(
          order.size(), begin + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(examples[order[i]]);
      Accumulate(weights, bias, batch, &step);
      for (std::size_t i = 0; i < dim; ++i) {
        weights[i] -= config.learning_rate * step.grad_weights[i];
      }
      bias -= config.learning_rate * step.grad_bias;
    }
  }
  ModelMetadata metadata{config.seed, config.epochs, config.batch_size,
                         config.learning_rate, provider_identity};
  return LinearClassifier(std::move(weights), bias, std::move(metadata));
}

std::vector<std::size_t> BalancedSample(std::span<const int> labels,
                                        std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? pos : neg).push_back(i);
  }
  std::vector<std::size_t>& larger = pos.size() > neg.size() ? pos : neg;
  std::vector<std::size_t>& smaller = pos.size() > neg.size() ? neg : pos;
  Rng rng(seed);
  rng.Shuffle(&larger);
  larger.resize(smaller.size());
  std::vector<std::size_t> out = smaller;
  out.insert(out.end(), larger.begin(), larger.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nemaudit
