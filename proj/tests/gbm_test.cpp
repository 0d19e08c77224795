//
// Copyright 2026 The mialab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mialab/gbm.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {
namespace {

struct Data {
  RowMatrix x;
  std::vector<int> y;
};

Data RandomData(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Data out{RowMatrix(n, d), std::vector<int>(n)};
  for (int i = 0; i < n; ++i) {
    double z = 0.0;
    for (int j = 0; j < d; ++j) {
      out.x(i, j) = rng.Normal();
      z += (j + 1) * 0.5 * out.x(i, j) * (j % 2 ? -1 : 1);
    }
    out.y[i] = rng.Uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
  }
  return out;
}

// Independent booster: recursive two-pass impurity per candidate, same split
// rule (midpoints, lowest feature then smallest threshold, strict gain) and
// the same Newton leaf value.
class ReferenceBooster {
 public:
  ReferenceBooster(const RowMatrix& x, const std::vector<int>& y) : x_(x), y_(y) {}

  std::vector<double> StageDeviances(int stages, int depth, double lr) {
    const int n = static_cast<int>(y_.size());
    double pos = 0;
    for (int v : y_) pos += v;
    const double base = std::log(pos / (n - pos));
    raw_.assign(n, base);
    std::vector<double> dev{Deviance()};
    for (int s = 0; s < stages; ++s) {
      p_.resize(n);
      r_.resize(n);
      for (int i = 0; i < n; ++i) {
        p_[i] = 1.0 / (1.0 + std::exp(-raw_[i]));
        r_[i] = y_[i] - p_[i];
      }
      std::vector<int> all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      std::vector<double> update(n, 0.0);
      Grow(all, 0, depth, update);
      for (int i = 0; i < n; ++i) raw_[i] += lr * update[i];
      dev.push_back(Deviance());
    }
    return dev;
  }

 private:
  double Sse(const std::vector<int>& idx) const {
    double m = 0;
    for (int i : idx) m += r_[i];
    m /= idx.size();
    double s = 0;
    for (int i : idx) s += (r_[i] - m) * (r_[i] - m);
    return s;
  }

  void Grow(const std::vector<int>& idx, int depth, int max_depth,
            std::vector<double>& update) {
    const double node = Sse(idx);
    int best_f = -1;
    double best_t = 0, best_imp = 0;
    if (depth < max_depth && idx.size() >= 2 &&
        node > 10 * std::numeric_limits<double>::epsilon() * idx.size()) {
      for (int f = 0; f < x_.cols(); ++f) {
        std::vector<double> v;
        for (int i : idx) v.push_back(x_(i, f));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
          const double t = v[k] + 0.5 * (v[k + 1] - v[k]);
          std::vector<int> l, r;
          for (int i : idx) (x_(i, f) <= t ? l : r).push_back(i);
          const double imp = Sse(l) + Sse(r);
          if (best_f < 0 || imp < best_imp - 1e-12 * node) {
            best_f = f;
            best_t = t;
            best_imp = imp;
          }
        }
      }
    }
    if (best_f >= 0 && best_imp < node * (1 - 1e-12)) {
      std::vector<int> l, r;
      for (int i : idx) (x_(i, best_f) <= best_t ? l : r).push_back(i);
      Grow(l, depth + 1, max_depth, update);
      Grow(r, depth + 1, max_depth, update);
      return;
    }
    double num = 0, den = 0;
    for (int i : idx) {
      num += r_[i];
      den += p_[i] * (1 - p_[i]);
    }
    const double leaf = num / std::max(den, 1e-12);
    for (int i : idx) update[i] = leaf;
  }

  double Deviance() const {
    double s = 0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double z = raw_[i];
      s += std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0) - y_[i] * z;
    }
    return s / y_.size();
  }

  const RowMatrix& x_;
  const std::vector<int>& y_;
  std::vector<double> raw_, p_, r_;
};

TEST(GbmTest, StageDevianceMatchesReferenceBooster) {
  const Data data = RandomData(200, 3, 1);
  const GbmModel m = FitGbm(data.x, data.y, {20, 3, 0.1});
  ReferenceBooster ref(data.x, data.y);
  const std::vector<double> expect = ref.StageDeviances(20, 3, 0.1);
  ASSERT_EQ(m.train_deviance.size(), expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) {
    EXPECT_NEAR(m.train_deviance[k], expect[k], 1e-9) << "stage " << k;
  }
}

TEST(GbmTest, DevianceEntriesMatchPredictions) {
  const Data data = RandomData(120, 4, 2);
  const GbmModel m = FitGbm(data.x, data.y);
  std::vector<double> raw(data.y.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = GbmRawScore(m, {data.x.row(i).data(), 4});
  }
  EXPECT_NEAR(BinomialDeviance(raw, data.y), m.train_deviance.back(), 1e-12);
}

TEST(GbmTest, MonotoneDevianceAndSeparable) {
  Data data{RowMatrix(40, 2), std::vector<int>(40)};
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    data.x(i, 0) = rng.Normal();
    data.x(i, 1) = rng.Normal() + (i < 20 ? 5.0 : -5.0);
    data.y[i] = i < 20 ? 1 : 0;
  }
  const GbmModel m = FitGbm(data.x, data.y);
  for (std::size_t k = 1; k < m.train_deviance.size(); ++k) {
    EXPECT_LE(m.train_deviance[k], m.train_deviance[k - 1]);
  }
  int correct = 0;
  for (int i = 0; i < 40; ++i) {
    correct += (GbmPredict(m, {data.x.row(i).data(), 2}) >= 0.5) == (data.y[i] == 1);
  }
  EXPECT_EQ(correct, 40);
}

TEST(GbmTest, ZeroLearningRatePredictsBaseRate) {
  const Data data = RandomData(50, 2, 4);
  const GbmModel m = FitGbm(data.x, data.y, {10, 3, 0.0});
  double pos = 0;
  for (int v : data.y) pos += v;
  for (int i = 0; i < 50; ++i) {
    EXPECT_NEAR(GbmPredict(m, {data.x.row(i).data(), 2}), pos / 50, 1e-12);
  }
}

TEST(GbmTest, SimpleModelsPredictions) {
  GbmModel empty;
  empty.n_features = 2;
  empty.base_score = 0.0;
  const std::vector<double> row{0.3, -1.0};
  EXPECT_EQ(GbmPredict(empty, row), 0.5);

  GbmModel stump;
  stump.n_features = 2;
  stump.learning_rate = 1.0;
  RegressionTree tree;
  tree.nodes.resize(3);
  tree.nodes[0] = {0, 0.0, 0.0, 1, 2};
  tree.nodes[1].value = -10.0;
  tree.nodes[2].value = 10.0;
  stump.trees.push_back(tree);
  EXPECT_GE(GbmPredict(stump, row), 0.9999);
  EXPECT_THROW(GbmPredict(stump, std::vector<double>{1.0}), ShapeError);
}

TEST(GbmTest, TreeDepthBounded) {
  const Data data = RandomData(150, 5, 5);
  for (int depth : {1, 2, 3}) {
    const GbmModel m = FitGbm(data.x, data.y, {15, depth, 0.1});
    EXPECT_LE(static_cast<int>(m.trees.size()), 15);
    for (const RegressionTree& t : m.trees) EXPECT_LE(t.Depth(), depth);
  }
}

TEST(GbmTest, Deterministic) {
  const Data data = RandomData(80, 3, 6);
  EXPECT_EQ(GbmToText(FitGbm(data.x, data.y, {}, 1)),
            GbmToText(FitGbm(data.x, data.y, {}, 1)));
}

TEST(GbmTest, TextRoundTripBitExact) {
  const Data data = RandomData(100, 4, 7);
  const GbmModel m = FitGbm(data.x, data.y);
  const GbmModel back = GbmFromText(GbmToText(m));
  const Data probe = RandomData(100, 4, 8);
  for (int i = 0; i < 100; ++i) {
    const std::span<const double> row{probe.x.row(i).data(), 4};
    EXPECT_EQ(GbmPredict(m, row), GbmPredict(back, row));
  }
  EXPECT_EQ(GbmToText(back), GbmToText(m));
}

TEST(GbmTest, RejectsBadInput) {
  const Data data = RandomData(20, 2, 9);
  std::vector<int> one_class(20, 1);
  EXPECT_THROW(FitGbm(data.x, one_class), DegenerateDataError);
  std::vector<int> short_labels(19, 0);
  EXPECT_THROW(FitGbm(data.x, short_labels), ShapeError);
  std::stringstream junk("not a model");
  EXPECT_THROW(ReadGbmText(junk), ValidationError);
}

TEST(SplitSearchTest, MatchesExhaustiveEnumeration) {
  Rng rng(10);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.Index(63));
    const int d = 1 + static_cast<int>(rng.Index(3));
    RowMatrix x(n, d);
    std::vector<double> r(n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) {
        x(i, j) = t % 2 ? rng.Normal() : static_cast<double>(rng.Index(4));
      }
      r[i] = rng.Normal();
      idx[i] = i;
    }
    const SplitCandidate got = FindBestSplit(x, r, idx);
    double best = std::numeric_limits<double>::infinity();
    for (int f = 0; f < d; ++f) {
      for (int a = 0; a < n; ++a) {
        // Threshold at each observed value: x <= value goes left.
        double sl = 0, sr = 0, ql = 0, qr = 0;
        int nl = 0, nr = 0;
        for (int i = 0; i < n; ++i) {
          if (x(i, f) <= x(a, f)) {
            sl += r[i], ql += r[i] * r[i], ++nl;
          } else {
            sr += r[i], qr += r[i] * r[i], ++nr;
          }
        }
        if (nl == 0 || nr == 0) continue;
        best = std::min(best, ql - sl * sl / nl + qr - sr * sr / nr);
      }
    }
    if (!std::isfinite(best)) {
      EXPECT_FALSE(got.valid);
      continue;
    }
    ASSERT_TRUE(got.valid);
    EXPECT_NEAR(got.impurity, best, 1e-9 * (1 + best));
  }
}

TEST(SplitSearchTest, TieBreaksLowestFeatureThenThreshold) {
  // Columns 0 and 1 induce the same partition; column 0 must win.
  RowMatrix x(4, 2);
  x << 0, 10, 1, 11, 2, 12, 3, 13;
  const std::vector<double> r{-1, -1, 1, 1};
  const std::vector<int> idx{0, 1, 2, 3};
  const SplitCandidate s = FindBestSplit(x, r, idx);
  EXPECT_EQ(s.feature, 0);
  EXPECT_DOUBLE_EQ(s.threshold, 1.5);
  // Symmetric residuals: both extreme thresholds tie; the smaller wins.
  const std::vector<double> r2{5, 0, 0, 5};
  const SplitCandidate s2 = FindBestSplit(x, r2, idx);
  EXPECT_EQ(s2.feature, 0);
  EXPECT_DOUBLE_EQ(s2.threshold, 0.5);
}

}  // namespace
}  // namespace mialab
