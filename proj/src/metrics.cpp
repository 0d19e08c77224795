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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "mialab/errors.hpp"

namespace mialab {

std::string_view ScoreKindName(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kMaxProb: return "max_prob";
    case ScoreKind::kEntropy: return "entropy";
    case ScoreKind::kLogLoss: return "log_loss";
    case ScoreKind::kLdaLogJoint: return "lda_log_joint";
    case ScoreKind::kGbmProbs: return "gbm_probs";
    case ScoreKind::kGbmLogits: return "gbm_logits";
    case ScoreKind::kCorrectPrediction: return "correct_prediction";
  }
  return "unknown";
}

std::optional<ScoreKind> ParseScoreKind(std::string_view name) {
  for (ScoreKind k : kAllScoreKinds) {
    if (ScoreKindName(k) == name) return k;
  }
  return std::nullopt;
}

Orientation ScoreOrientation(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kEntropy:
    case ScoreKind::kLogLoss:
      return Orientation::kLowerIsMember;
    default:
      return Orientation::kHigherIsMember;
  }
}

std::string_view OrientationName(Orientation orientation) {
  return orientation == Orientation::kHigherIsMember ? "higher_is_member"
                                                     : "lower_is_member";
}

bool IsGbmKind(ScoreKind kind) {
  return kind == ScoreKind::kGbmProbs || kind == ScoreKind::kGbmLogits;
}

void ValidateAttackScores(const AttackScores& scores) {
  if (scores.member_scores.empty() || scores.nonmember_scores.empty()) {
    throw InsufficientDataError("AUROC needs at least one member and one nonmember");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(scores.member_scores) || !finite(scores.nonmember_scores)) {
    throw ValidationError("attack scores must be finite");
  }
}

double Auroc(std::span<const double> positives, std::span<const double> negatives) {
  const std::size_t np = positives.size();
  const std::size_t nn = negatives.size();
  if (np == 0 || nn == 0) {
    throw InsufficientDataError("AUROC needs both sides nonempty");
  }
  struct Entry {
    double value;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(np + nn);
  for (double v : positives) all.push_back({v, true});
  for (double v : negatives) all.push_back({v, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });
  // Twice the positive rank sum, with tied groups sharing first + last.
  std::uint64_t doubled_rank_sum = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].value == all[i].value) ++j;
    const std::uint64_t doubled_rank = (i + 1) + (j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (all[k].positive) doubled_rank_sum += doubled_rank;
    }
    i = j + 1;
  }
  // 2U = 2 R - n_p (n_p + 1), an exact integer; divided once so the result is
  // bit-identical to direct pair counting (2 wins + ties) / (2 n_p n_n).
  const std::uint64_t doubled_u = doubled_rank_sum - np * (np + 1);
  return static_cast<double>(doubled_u) / static_cast<double>(2 * np * nn);
}

double Auroc(const AttackScores& scores) {
  ValidateAttackScores(scores);
  if (scores.orientation == Orientation::kHigherIsMember) {
    return Auroc(scores.member_scores, scores.nonmember_scores);
  }
  std::vector<double> m(scores.member_scores.size()), n(scores.nonmember_scores.size());
  std::transform(scores.member_scores.begin(), scores.member_scores.end(), m.begin(),
                 std::negate<>());
  std::transform(scores.nonmember_scores.begin(), scores.nonmember_scores.end(),
                 n.begin(), std::negate<>());
  return Auroc(m, n);
}

double Advantage(double auroc) { return std::max(auroc, 1.0 - auroc); }

AttackResult EvaluateAttack(const AttackScores& scores) {
  AttackResult r;
  r.auroc = Auroc(scores);
  r.advantage = Advantage(r.auroc);
  r.kind = scores.kind;
  r.n_member = static_cast<int>(scores.member_scores.size());
  r.n_nonmember = static_cast<int>(scores.nonmember_scores.size());
  const auto [hm, hn] = PooledHistograms(scores.member_scores, scores.nonmember_scores);
  r.score_jsd = Jsd(hm, hn);
  return r;
}

Histogram MakeHistogram(std::span<const double> values, std::vector<double> edges) {
  if (edges.size() < 2) throw ValidationError("histogram needs at least one bin");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw ValidationError("histogram edges must be strictly increasing");
    }
  }
  if (values.empty()) throw InsufficientDataError("histogram of no values");
  const std::size_t bins = edges.size() - 1;
  std::vector<double> counts(bins, 0.0);
  std::size_t inside = 0;
  for (double v : values) {
    if (v < edges.front() || v > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    std::size_t b = static_cast<std::size_t>(it - edges.begin());
    b = b == 0 ? 0 : b - 1;
    if (b >= bins) b = bins - 1;
    counts[b] += 1.0;
    ++inside;
  }
  if (inside == 0) throw ValidationError("no values fall inside histogram edges");
  Histogram h;
  h.bin_edges = std::move(edges);
  h.masses.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) h.masses[b] = counts[b] / inside;
  return h;
}

std::pair<Histogram, Histogram> PooledHistograms(std::span<const double> a,
                                                 std::span<const double> b,
                                                 int bins) {
  if (bins < 1) throw ValidationError("bins must be >= 1");
  if (a.empty() || b.empty()) throw InsufficientDataError("histogram of no values");
  double lo = std::min(*std::min_element(a.begin(), a.end()),
                       *std::min_element(b.begin(), b.end()));
  double hi = std::max(*std::max_element(a.begin(), a.end()),
                       *std::max_element(b.begin(), b.end()));
  if (!(lo < hi)) {
    lo -= 0.5;
    hi += 0.5;
  }
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) edges[i] = lo + (hi - lo) * i / bins;
  edges.back() = hi;
  return {MakeHistogram(a, edges), MakeHistogram(b, edges)};
}

double Jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("JSD inputs differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) total += 0.5 * p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) total += 0.5 * q[i] * std::log(q[i] / m);
  }
  return std::clamp(total, 0.0, std::log(2.0));
}

double Jsd(const Histogram& p, const Histogram& q) {
  if (p.bin_edges != q.bin_edges) {
    throw ValidationError("JSD requires identical histogram edges");
  }
  return Jsd(p.masses, q.masses);
}

MeanSem ComputeMeanSem(std::span<const double> values) {
  if (values.empty()) throw InsufficientDataError("mean of no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace mialab
