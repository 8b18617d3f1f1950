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

// Independent reference computations used by the unit and acceptance tests.
// None of these share code with the library.

#ifndef NEMAUDIT_TESTS_ORACLES_H_
#define NEMAUDIT_TESTS_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nemaudit::oracle {

// Mann-Whitney statistic by enumerating every (positive, negative) pair.
inline double BruteForceAuc(const std::vector<std::pair<double, int>>& scored) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& [sp, lp] : scored) {
    if (lp != 1) continue;
    for (const auto& [sn, ln] : scored) {
      if (ln != 0) continue;
      pairs += 1.0;
      if (sp > sn) {
        wins += 1.0;
      } else if (sp == sn) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

inline double AdaptiveSimpson(const std::function<double(double)>& f, double a, double b,
                              double fa, double fm, double fb, double whole, double eps,
                              int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return AdaptiveSimpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         AdaptiveSimpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

inline double Integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return AdaptiveSimpson(f, a, b, fa, fm, fb, whole, eps, 60);
}

inline double StudentTDensity(double t, double df) {
  const double log_c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                       0.5 * std::log(df * M_PI);
  return std::exp(log_c - 0.5 * (df + 1.0) * std::log1p(t * t / df));
}

// Two-tailed p by integrating the density on [0, |t|].
inline double TwoTailedP(double t, double df) {
  const double inner =
      Integrate([df](double x) { return StudentTDensity(x, df); }, 0.0, std::fabs(t));
  return 1.0 - 2.0 * inner;
}

// I_x(a, b) by integrating the beta density; valid for a, b >= 1.
inline double IncompleteBeta(double x, double a, double b) {
  const double log_b = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto density = [&](double u) {
    if (u <= 0.0 || u >= 1.0) {
      if ((u <= 0.0 && a == 1.0) || (u >= 1.0 && b == 1.0)) return std::exp(-log_b);
      return 0.0;
    }
    return std::exp((a - 1.0) * std::log(u) + (b - 1.0) * std::log1p(-u) - log_b);
  };
  return Integrate(density, 0.0, x);
}

// Greedy longest-match-first segmentation, written from the definition:
// at each offset try every remaining length from longest to shortest.
inline std::vector<std::string> GreedySegment(const std::string& word,
                                              const std::unordered_set<std::string>& vocab,
                                              const std::string& unk) {
  std::vector<std::string> pieces;
  std::size_t pos = 0;
  while (pos < word.size()) {
    bool found = false;
    for (std::size_t len = word.size() - pos; len > 0; --len) {
      std::string piece = word.substr(pos, len);
      if (pos > 0) piece = "##" + piece;
      if (vocab.count(piece)) {
        pieces.push_back(piece);
        pos += len;
        found = true;
        break;
      }
    }
    if (!found) return {unk};
  }
  return pieces;
}

// Central finite difference of f at x along coordinate i.
inline double CentralDifference(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

// A scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
    path_ = std::filesystem::temp_directory_path() /
            ("nemaudit_test_" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace nemaudit::oracle

#endif  // NEMAUDIT_TESTS_ORACLES_H_
