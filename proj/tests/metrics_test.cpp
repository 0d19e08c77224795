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

#include "mialab/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {
namespace {

AttackScores Make(std::vector<double> m, std::vector<double> n,
                  Orientation o = Orientation::kHigherIsMember) {
  AttackScores s;
  s.member_scores = std::move(m);
  s.nonmember_scores = std::move(n);
  s.orientation = o;
  return s;
}

double BrutePairs(const std::vector<double>& m, const std::vector<double>& n) {
  double wins = 0;
  for (double a : m) {
    for (double b : n) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return wins / (m.size() * n.size());
}

TEST(AurocTest, Examples) {
  EXPECT_EQ(Auroc(Make({0.9, 0.8}, {0.7, 0.6})), 1.0);
  EXPECT_EQ(Auroc(Make({0.3, 0.1, 0.3}, {0.1, 0.3, 0.3})), 0.5);
  EXPECT_EQ(Auroc(Make({0.9, 0.6}, {0.8, 0.7})), 0.5);
  EXPECT_EQ(Auroc(Make({0.9, 0.8}, {0.7, 0.6}, Orientation::kLowerIsMember)), 0.0);
  EXPECT_THROW(Auroc(Make({}, {0.1})), InsufficientDataError);
}

TEST(AurocTest, MatchesBruteForcePairCounting) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const int nm = 1 + static_cast<int>(rng.Index(100));
    const int nn = 1 + static_cast<int>(rng.Index(100));
    std::vector<double> m(nm), n(nn);
    // Coarse values force many ties.
    for (double& v : m) v = t % 2 ? rng.Normal() : static_cast<double>(rng.Index(5));
    for (double& v : n) v = t % 2 ? rng.Normal() : static_cast<double>(rng.Index(5));
    EXPECT_EQ(Auroc(Make(m, n)), BrutePairs(m, n));
  }
}

TEST(AurocTest, Invariances) {
  Rng rng(2);
  std::vector<double> m(60), n(70);
  for (double& v : m) v = rng.Normal() + 0.4;
  for (double& v : n) v = rng.Normal();
  const double base = Auroc(Make(m, n));
  std::vector<double> tm, tn, fm, fn;
  for (double v : m) tm.push_back(std::exp(3 * v)), fm.push_back(-v);
  for (double v : n) tn.push_back(std::exp(3 * v)), fn.push_back(-v);
  EXPECT_DOUBLE_EQ(Auroc(Make(tm, tn)), base);
  // Sign flip together with orientation flip.
  EXPECT_DOUBLE_EQ(Auroc(Make(fm, fn, Orientation::kLowerIsMember)), base);
  EXPECT_DOUBLE_EQ(Advantage(Auroc(Make(fm, fn))), Advantage(base));
  EXPECT_DOUBLE_EQ(Auroc(Make(n, m)), 1.0 - base);
}

TEST(AdvantageTest, Examples) {
  EXPECT_EQ(Advantage(0.5), 0.5);
  EXPECT_DOUBLE_EQ(Advantage(0.2), 0.8);
  EXPECT_EQ(Advantage(1.0), 1.0);
}

TEST(JsdTest, Examples) {
  const std::vector<double> edges{0.0, 1.0, 2.0};
  const Histogram p{edges, {0.75, 0.25}};
  const Histogram q{edges, {0.25, 0.75}};
  EXPECT_EQ(Jsd(p, p), 0.0);
  // m is uniform, so JSD = ln 2 - H(0.75, 0.25).
  const double expect = std::numbers::ln2 + 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  EXPECT_NEAR(Jsd(p, q), expect, 1e-15);
  EXPECT_NEAR(Jsd(p, q), 0.13081, 5e-6);
  EXPECT_DOUBLE_EQ(Jsd(p, q), Jsd(q, p));
  const Histogram a{edges, {1.0, 0.0}};
  const Histogram b{edges, {0.0, 1.0}};
  EXPECT_NEAR(Jsd(a, b), std::numbers::ln2, 1e-15);
  const Histogram other{{0.0, 1.0, 3.0}, {0.5, 0.5}};
  EXPECT_THROW(Jsd(p, other), ValidationError);
}

TEST(JsdTest, BoundedOnRandomVectors) {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> p = rng.FlatDirichlet(6), q = rng.FlatDirichlet(6);
    const double v = Jsd(p, q);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, std::numbers::ln2 + 1e-15);
  }
}

TEST(HistogramTest, MassesAndPooledEdges) {
  const std::vector<double> values{0.0, 0.5, 1.0, 1.0};
  const Histogram h = MakeHistogram(values, {0.0, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(h.masses[0], 0.25);
  EXPECT_DOUBLE_EQ(h.masses[1], 0.75);  // right edge closed
  EXPECT_THROW(MakeHistogram(values, {1.0, 0.0}), ValidationError);
  const std::vector<double> a{0.0, 1.0}, b{2.0, 3.0};
  const auto [ha, hb] = PooledHistograms(a, b, 4);
  EXPECT_EQ(ha.bin_edges, hb.bin_edges);
  EXPECT_EQ(ha.bin_edges.front(), 0.0);
  EXPECT_EQ(ha.bin_edges.back(), 3.0);
  EXPECT_NEAR(Jsd(ha, hb), std::numbers::ln2, 1e-15);
}

TEST(MeanSemTest, Examples) {
  const std::vector<double> one{3.0}, ones{1, 1, 1, 1}, two{0.0, 1.0};
  EXPECT_EQ(ComputeMeanSem(one).mean, 3.0);
  EXPECT_EQ(ComputeMeanSem(one).sem, 0.0);
  EXPECT_EQ(ComputeMeanSem(ones).mean, 1.0);
  EXPECT_EQ(ComputeMeanSem(ones).sem, 0.0);
  EXPECT_DOUBLE_EQ(ComputeMeanSem(two).mean, 0.5);
  EXPECT_DOUBLE_EQ(ComputeMeanSem(two).sem, 0.5);
}

TEST(EvaluateAttackTest, Fields) {
  AttackScores s = Make({0.1, 0.2, 0.3}, {0.6, 0.7});
  const AttackResult r = EvaluateAttack(s);
  EXPECT_EQ(r.auroc, 0.0);
  EXPECT_EQ(r.advantage, 1.0);
  EXPECT_EQ(r.n_member, 3);
  EXPECT_EQ(r.n_nonmember, 2);
  EXPECT_NEAR(r.score_jsd, std::numbers::ln2, 1e-12);
}

}  // namespace
}  // namespace mialab
