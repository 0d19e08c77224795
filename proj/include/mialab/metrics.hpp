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

#ifndef MIALAB_METRICS_HPP_
#define MIALAB_METRICS_HPP_

#include <span>
#include <utility>
#include <vector>

#include "mialab/scores.hpp"

namespace mialab {

// Mann-Whitney AUROC: the fraction of (member, nonmember) pairs in which the
// member is more member-like, ties counted 1/2. Orientation is applied first.
// Equals the trapezoidal ROC area. O((n + m) log(n + m)).
double Auroc(const AttackScores& scores);
// Raw form for callers that already oriented scores as higher-is-positive.
double Auroc(std::span<const double> positives, std::span<const double> negatives);

// max(auroc, 1 - auroc)
double Advantage(double auroc);

struct AttackResult {
  double auroc = 0.5;
  double advantage = 0.5;
  ScoreKind kind = ScoreKind::kMaxProb;
  int n_member = 0;
  int n_nonmember = 0;
  // JSD between member and nonmember score histograms (32 pooled bins).
  double score_jsd = 0.0;
};

AttackResult EvaluateAttack(const AttackScores& scores);

struct Histogram {
  std::vector<double> bin_edges;  // strictly increasing, size = bins + 1
  std::vector<double> masses;     // sums to 1
};

// Histogram of `values` on fixed edges; the last bin is closed on the right.
Histogram MakeHistogram(std::span<const double> values, std::vector<double> edges);
// Two histograms on shared equal-width edges spanning the pooled min/max.
std::pair<Histogram, Histogram> PooledHistograms(std::span<const double> a,
                                                 std::span<const double> b,
                                                 int bins = 32);

// Jensen-Shannon divergence in nats; in [0, ln 2]. Edges must match exactly.
double Jsd(const Histogram& p, const Histogram& q);
double Jsd(std::span<const double> p, std::span<const double> q);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

// Sample mean and std / sqrt(n) with the n - 1 denominator; sem = 0 at n = 1.
MeanSem ComputeMeanSem(std::span<const double> values);

}  // namespace mialab

#endif  // MIALAB_METRICS_HPP_
