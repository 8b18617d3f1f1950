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
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "nemaudit/error.h"
#include "oracles.h"

namespace nemaudit {
namespace {

struct Data {
  std::vector<std::vector<double>> x;
  std::vector<int> y;

  std::vector<Example> Examples() const {
    std::vector<Example> out;
    for (std::size_t i = 0; i < x.size(); ++i) out.push_back({x[i], y[i]});
    return out;
  }
};

Data RandomData(std::mt19937_64& gen, std::size_t n, std::size_t dim) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& e : v) e = nd(gen);
    d.x.push_back(v);
    d.y.push_back(static_cast<int>(gen() % 2));
  }
  d.y[0] = 0;
  d.y[1] = 1;
  return d;
}

// Mean cross-entropy written directly from the definition.
double ReferenceLoss(const std::vector<double>& params, const Data& d) {
  const std::size_t dim = params.size() - 1;
  double total = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double z = params[dim];
    for (std::size_t j = 0; j < dim; ++j) z += params[j] * d.x[i][j];
    const double p = 1.0 / (1.0 + std::exp(-z));
    total += d.y[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
  }
  return total / static_cast<double>(d.x.size());
}

TEST(SigmoidTest, StableAtExtremes) {
  EXPECT_EQ(Sigmoid(0.0), 0.5);
  EXPECT_GT(Sigmoid(50.0), 1.0 - 1e-9);
  EXPECT_LT(Sigmoid(-50.0), 1e-9);
  EXPECT_EQ(Sigmoid(-1000.0), 0.0);
  EXPECT_EQ(Sigmoid(1000.0), 1.0);
  EXPECT_NEAR(Sigmoid(1.3) + Sigmoid(-1.3), 1.0, 1e-15);
}

TEST(GradientTest, MatchesCentralDifferences) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + gen() % 32;
    const Data d = RandomData(gen, 2 + gen() % 30, dim);
    std::vector<double> params(dim + 1);
    for (double& p : params) p = nd(gen);
    const std::vector<double> w(params.begin(), params.end() - 1);
    const LossGradient g = MeanLossAndGradient(w, params.back(), d.Examples());
    EXPECT_NEAR(g.loss, ReferenceLoss(params, d), 1e-12);
    auto f = [&](const std::vector<double>& p) { return ReferenceLoss(p, d); };
    for (std::size_t i = 0; i <= dim; ++i) {
      const double numeric = oracle::CentralDifference(f, params, i, 1e-5);
      const double analytic = i < dim ? g.grad_weights[i] : g.grad_bias;
      const double scale = std::max({std::fabs(numeric), std::fabs(analytic), 1e-3});
      EXPECT_LT(std::fabs(numeric - analytic) / scale, 1e-5) << trial << " " << i;
    }
  }
}

TEST(TrainTest, AntipodalPairIsSeparated) {
  const std::vector<double> a = {1.0, 0.0, 0.0};
  const std::vector<double> b = {-1.0, 0.0, 0.0};
  const std::vector<Example> ex = {{a, 1}, {b, 0}};
  const LinearClassifier m = Train(ex, TrainConfig{});
  EXPECT_EQ(m.Classify(a, 0.5), 1);
  EXPECT_EQ(m.Classify(b, 0.5), 0);
}

TEST(TrainTest, IdenticalInputsConvergeToClassPrior) {
  const std::vector<double> x = {0.3, -0.2};
  std::vector<Example> ex;
  for (int i = 0; i < 30; ++i) ex.push_back({x, i < 9 ? 1 : 0});
  TrainConfig c;
  c.learning_rate = 1.0;
  c.epochs = 400;
  const LinearClassifier m = Train(ex, c);
  EXPECT_NEAR(m.PredictProba(x), 9.0 / 30.0, 1e-6);
}

TEST(TrainTest, SeparableDatasetReachesFullAccuracy) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::vector<double> direction = {0.6, -0.8, 0.0, 0.0};
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  while (xs.size() < 200) {
    std::vector<double> v(4);
    for (double& e : v) e = nd(gen);
    double proj = 0.0;
    for (int j = 0; j < 4; ++j) proj += v[j] * direction[j];
    if (std::fabs(proj) < 0.3) continue;
    xs.push_back(v);
    ys.push_back(proj > 0 ? 1 : 0);
  }
  std::vector<Example> ex;
  for (std::size_t i = 0; i < xs.size(); ++i) ex.push_back({xs[i], ys[i]});
  TrainConfig c;
  c.learning_rate = 1.0;
  c.epochs = 200;
  const LinearClassifier m = Train(ex, c);
  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) correct += m.Classify(xs[i], 0.5) == ys[i];
  EXPECT_EQ(correct, 200);
}

TEST(TrainTest, DeterministicForFixedSeed) {
  std::mt19937_64 gen(1);
  const Data d = RandomData(gen, 150, 8);
  TrainConfig c;
  c.seed = 99;
  const LinearClassifier a = Train(d.Examples(), c);
  const LinearClassifier b = Train(d.Examples(), c);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
  c.seed = 100;
  EXPECT_NE(Train(d.Examples(), c).weights(), a.weights());
}

TEST(TrainTest, LossNonIncreasingWithSmallSteps) {
  std::mt19937_64 gen(4);
  const Data d = RandomData(gen, 120, 6);
  TrainConfig c;
  c.learning_rate = 1e-3;
  c.shuffle = false;
  double previous = INFINITY;
  for (int epochs = 0; epochs <= 20; ++epochs) {
    c.epochs = epochs;
    const LinearClassifier m = Train(d.Examples(), c);
    const double loss = MeanLossAndGradient(m.weights(), m.bias(), d.Examples()).loss;
    EXPECT_LE(loss, previous + 1e-15) << epochs;
    previous = loss;
  }
}

TEST(TrainTest, RejectsBadInput) {
  const std::vector<double> a = {1.0, 0.0};
  const std::vector<double> b = {1.0};
  EXPECT_THROW(Train(std::vector<Example>{{a, 1}, {a, 1}}, TrainConfig{}), Error);
  EXPECT_THROW(Train(std::vector<Example>{{a, 1}, {b, 0}}, TrainConfig{}), Error);
  EXPECT_THROW(Train(std::vector<Example>{{a, 2}, {a, 0}}, TrainConfig{}), Error);
  EXPECT_THROW(Train(std::vector<Example>{}, TrainConfig{}), Error);
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(Train(std::vector<Example>{{a, 1}, {a, 0}}, c), Error);
  c = TrainConfig{};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig{};
  c.threshold = 1.0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(PredictTest, Examples) {
  const LinearClassifier zero({0.0, 0.0, 0.0}, 0.0);
  EXPECT_EQ(zero.PredictProba(std::vector<double>{3, -1, 2}), 0.5);
  const LinearClassifier big({0.0}, 50.0);
  EXPECT_GT(big.PredictProba(std::vector<double>{1.0}), 1.0 - 1e-9);
  const LinearClassifier orth({1.0, 0.0}, 0.0);
  EXPECT_EQ(orth.PredictProba(std::vector<double>{0.0, 5.0}), 0.5);
  EXPECT_THROW(orth.PredictProba(std::vector<double>{1.0}), Error);
}

TEST(ClassifyTest, ThresholdBoundary) {
  const LinearClassifier zero({0.0}, 0.0);
  EXPECT_EQ(zero.Classify(std::vector<double>{1.0}, 0.5), 1);
  // logit(0.49) and logit(0.8) as biases.
  const LinearClassifier low({0.0}, std::log(0.49 / 0.51));
  EXPECT_EQ(low.Classify(std::vector<double>{1.0}, 0.5), 0);
  const LinearClassifier mid({0.0}, std::log(0.8 / 0.2));
  EXPECT_EQ(mid.Classify(std::vector<double>{1.0}, 0.9), 0);
  EXPECT_EQ(mid.Classify(std::vector<double>{1.0}, 0.5), 1);
}

TEST(ClassifyTest, MonotoneInThreshold) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const LinearClassifier m({nd(gen), nd(gen)}, nd(gen));
    const std::vector<double> x = {nd(gen), nd(gen)};
    int previous = 1;
    for (double t = 0.01; t < 1.0; t += 0.01) {
      const int c = m.Classify(x, t);
      EXPECT_LE(c, previous);
      previous = c;
    }
  }
}

TEST(ModelIoTest, RoundTripPreservesPredictions) {
  std::mt19937_64 gen(12);
  const Data d = RandomData(gen, 80, 16);
  TrainConfig c;
  c.seed = 5;
  const LinearClassifier m = Train(d.Examples(), c, "deterministic-test:seed=1");
  const LinearClassifier back = LinearClassifier::Parse(m.Serialize());
  EXPECT_EQ(back.weights(), m.weights());
  EXPECT_EQ(back.bias(), m.bias());
  EXPECT_EQ(back.metadata(), m.metadata());
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(16);
    for (double& e : x) e = nd(gen);
    EXPECT_EQ(back.PredictProba(x), m.PredictProba(x));
  }
  oracle::TempDir dir;
  m.Save(dir / "m.txt");
  EXPECT_EQ(LinearClassifier::Load(dir / "m.txt").weights(), m.weights());
}

TEST(ModelIoTest, FileLayout) {
  const LinearClassifier m({0.5, -0.25}, 0.125,
                           ModelMetadata{3, 10, 64, 0.01, "deterministic-test:seed=3"});
  const std::string text = m.Serialize();
  EXPECT_EQ(text.substr(0, text.find('\n')), "NEMAUDIT-MODEL v1 dim=2");
  EXPECT_NE(text.find("\n0.125\n0.5 -0.25\n{"), std::string::npos);
}

TEST(ModelIoTest, RejectsDamagedFiles) {
  const LinearClassifier m({0.5, -0.25}, 0.125);
  const std::string text = m.Serialize();
  EXPECT_THROW(LinearClassifier::Parse(text.substr(0, text.size() / 2)), Error);
  std::string wrong_dim = text;
  wrong_dim.replace(wrong_dim.find("dim=2"), 5, "dim=3");
  EXPECT_THROW(LinearClassifier::Parse(wrong_dim), Error);
  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("v1"), 2, "v9");
  EXPECT_THROW(LinearClassifier::Parse(wrong_version), Error);
  EXPECT_THROW(LinearClassifier::Parse(""), Error);
  EXPECT_THROW(LinearClassifier({1.0, NAN}, 0.0), Error);
  EXPECT_THROW(LinearClassifier({}, 0.0), Error);
}

TEST(BalancedSampleTest, OneToOneAndSeeded) {
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 4 == 0 ? 1 : 0);
  const auto s = BalancedSample(labels, 7);
  int pos = 0;
  for (std::size_t i : s) pos += labels[i];
  EXPECT_EQ(pos, 25);
  EXPECT_EQ(s.size(), 50u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), s.size());
  EXPECT_EQ(BalancedSample(labels, 7), s);
  EXPECT_NE(BalancedSample(labels, 8), s);
}

}  // namespace
}  // namespace nemaudit
