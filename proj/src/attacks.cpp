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

#include "mialab/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {

namespace {

constexpr double kProbFloor = 1e-300;

void CheckProbabilityVector(std::span<const double> p) {
  if (p.empty()) throw ValidationError("posterior vector is empty");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("posterior entries must lie in [0, 1]");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("posterior vector does not sum to 1");
  }
}

double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

std::vector<double> RowScores(const TargetOutputs& out, const std::vector<int>& labels,
                              ScoreKind kind) {
  const Eigen::Index n = out.posteriors.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw ShapeError("label count does not match output rows");
  }
  std::vector<double> scores(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p[2] = {out.posteriors(i, 0), out.posteriors(i, 1)};
    const int t = ClassIndex(labels[i]);
    switch (kind) {
      case ScoreKind::kMaxProb:
        scores[i] = std::max(p[0], p[1]);
        break;
      case ScoreKind::kEntropy: {
        double h = 0.0;
        for (int k = 0; k < 2; ++k) {
          if (p[k] > 0.0) h -= p[k] * out.log_posteriors(i, k);
        }
        scores[i] = h;
        break;
      }
      case ScoreKind::kLogLoss:
        scores[i] = -out.log_posteriors(i, t);
        break;
      case ScoreKind::kLdaLogJoint:
        scores[i] = std::max(out.logits(i, 0), out.logits(i, 1));
        break;
      case ScoreKind::kCorrectPrediction:
        scores[i] = PredictFromPosterior({p[0], p[1]}) == labels[i] ? 1.0 : 0.0;
        break;
      default:
        throw ValidationError(std::string(ScoreKindName(kind)) +
                              " is not a threshold score");
    }
  }
  return scores;
}

}  // namespace

double ScoreMaxProb(std::span<const double> posteriors) {
  CheckProbabilityVector(posteriors);
  return *std::max_element(posteriors.begin(), posteriors.end());
}

double ScoreEntropy(std::span<const double> posteriors) {
  CheckProbabilityVector(posteriors);
  double h = 0.0;
  for (double p : posteriors) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double ScoreLogLoss(std::span<const double> posteriors, int true_index) {
  CheckProbabilityVector(posteriors);
  if (true_index < 0 || true_index >= static_cast<int>(posteriors.size())) {
    throw ValidationError("true label index out of range");
  }
  return -std::log(std::clamp(posteriors[true_index], kProbFloor, 1.0));
}

double ScoreLdaLogJoint(std::span<const double> log_joint) {
  if (log_joint.empty()) throw ValidationError("log-joint vector is empty");
  for (double v : log_joint) {
    if (!std::isfinite(v)) throw ValidationError("log-joint entries must be finite");
  }
  return *std::max_element(log_joint.begin(), log_joint.end());
}

double ScoreCorrectPrediction(std::span<const double> posteriors, int true_index) {
  CheckProbabilityVector(posteriors);
  if (true_index < 0 || true_index >= static_cast<int>(posteriors.size())) {
    throw ValidationError("true label index out of range");
  }
  // Argmax with ties toward the higher class index (+1 in the binary case).
  int best = 0;
  for (int k = 1; k < static_cast<int>(posteriors.size()); ++k) {
    if (posteriors[k] >= posteriors[best]) best = k;
  }
  return best == true_index ? 1.0 : 0.0;
}

std::vector<double> BuildAttackFeatures(std::span<const double> outputs,
                                        int true_index, AttackInterface interface) {
  const int k = static_cast<int>(outputs.size());
  if (k == 0) throw ValidationError("model output vector is empty");
  if (true_index < 0 || true_index >= k) {
    throw ValidationError("true label index out of range");
  }
  for (double v : outputs) {
    if (!std::isfinite(v)) throw ValidationError("model outputs must be finite");
  }
  if (interface == AttackInterface::kProbs) CheckProbabilityVector(outputs);
  std::vector<double> row(outputs.begin(), outputs.end());
  row.resize(2 * k, 0.0);
  row[k + true_index] = 1.0;
  return row;
}

bool IsLda(const TargetModel& model) {
  return std::holds_alternative<LdaModel>(model);
}

TargetOutputs ComputeOutputs(const TargetModel& model, const RowMatrix& features) {
  TargetOutputs out;
  const Eigen::Index n = features.rows();
  out.posteriors.resize(n, 2);
  out.log_posteriors.resize(n, 2);
  out.logits.resize(n, 2);
  if (const auto* lr = std::get_if<LogisticModel>(&model)) {
    const Eigen::VectorXd z = LogisticLogits(*lr, features);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ClassPair p = LogitPosterior(z(i));
      out.posteriors(i, 0) = p[0];
      out.posteriors(i, 1) = p[1];
      out.log_posteriors(i, 0) = -Softplus(z(i));
      out.log_posteriors(i, 1) = -Softplus(-z(i));
      out.logits(i, 0) = 0.0;
      out.logits(i, 1) = z(i);
    }
  } else {
    const auto& lda = std::get<LdaModel>(model);
    out.logits = LogJointBatch(lda, features);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = out.logits(i, 0), b = out.logits(i, 1);
      const double m = std::max(a, b);
      const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
      out.log_posteriors(i, 0) = a - lse;
      out.log_posteriors(i, 1) = b - lse;
      const ClassPair p = SoftmaxPair({a, b});
      out.posteriors(i, 0) = p[0];
      out.posteriors(i, 1) = p[1];
    }
  }
  return out;
}

std::vector<double> ThresholdScores(const TargetOutputs& outputs,
                                    const std::vector<int>& labels, ScoreKind kind) {
  return RowScores(outputs, labels, kind);
}

std::vector<double> ThresholdScores(const TargetModel& model, const Dataset& data,
                                    ScoreKind kind) {
  if (kind == ScoreKind::kLdaLogJoint && !IsLda(model)) {
    throw ValidationError("lda_log_joint requires an LDA target");
  }
  return RowScores(ComputeOutputs(model, data.features), data.labels, kind);
}

AttackScores ThresholdAttack(const TargetModel& model, const Dataset& members,
                             const Dataset& nonmembers, ScoreKind kind) {
  AttackScores scores;
  scores.kind = kind;
  scores.orientation = ScoreOrientation(kind);
  scores.member_scores = ThresholdScores(model, members, kind);
  scores.nonmember_scores = ThresholdScores(model, nonmembers, kind);
  ValidateAttackScores(scores);
  return scores;
}

GbmAttackOutcome RunGbmAttackOnOutputs(const RowMatrix& member_outputs,
                                       const std::vector<int>& member_index,
                                       const RowMatrix& nonmember_outputs,
                                       const std::vector<int>& nonmember_index,
                                       AttackInterface interface,
                                       std::uint64_t split_seed,
                                       const GbmAttackConfig& config) {
  const int n_mem = static_cast<int>(member_outputs.rows());
  const int n_non = static_cast<int>(nonmember_outputs.rows());
  if (static_cast<int>(member_index.size()) != n_mem ||
      static_cast<int>(nonmember_index.size()) != n_non ||
      member_outputs.cols() != nonmember_outputs.cols()) {
    throw ShapeError("attack outputs and labels have inconsistent shapes");
  }
  const int pool = std::min(n_mem, n_non);
  if (pool < 4) {
    throw InsufficientDataError("GBM attack needs at least 4 samples per side");
  }
  auto draw = [&](int n, std::string_view tag) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(DeriveSeed(split_seed, tag));
    rng.Shuffle(idx);
    idx.resize(pool);
    return idx;
  };
  // One shuffle per side both downsamples and assigns the train/eval halves.
  const std::vector<int> mem = draw(n_mem, "gbm-attack/members");
  const std::vector<int> non = draw(n_non, "gbm-attack/nonmembers");
  const int half = pool / 2;

  const int k = static_cast<int>(member_outputs.cols());
  auto feature_row = [&](const RowMatrix& outputs, const std::vector<int>& labels,
                         int row) {
    return BuildAttackFeatures(
        {outputs.row(row).data(), static_cast<std::size_t>(k)}, labels[row], interface);
  };
  RowMatrix train(2 * half, 2 * k);
  std::vector<int> train_labels(2 * half);
  for (int i = 0; i < half; ++i) {
    const auto m = feature_row(member_outputs, member_index, mem[i]);
    const auto n = feature_row(nonmember_outputs, nonmember_index, non[i]);
    for (int c = 0; c < 2 * k; ++c) {
      train(2 * i, c) = m[c];
      train(2 * i + 1, c) = n[c];
    }
    train_labels[2 * i] = 1;
    train_labels[2 * i + 1] = 0;
  }
  GbmAttackOutcome outcome;
  outcome.model = FitGbm(train, train_labels, config.gbm, split_seed);
  outcome.scores.kind =
      interface == AttackInterface::kProbs ? ScoreKind::kGbmProbs : ScoreKind::kGbmLogits;
  outcome.scores.orientation = Orientation::kHigherIsMember;
  for (int i = half; i < pool; ++i) {
    const auto m = feature_row(member_outputs, member_index, mem[i]);
    const auto n = feature_row(nonmember_outputs, nonmember_index, non[i]);
    outcome.scores.member_scores.push_back(GbmPredict(outcome.model, m));
    outcome.scores.nonmember_scores.push_back(GbmPredict(outcome.model, n));
    outcome.eval_members.push_back(mem[i]);
    outcome.eval_nonmembers.push_back(non[i]);
  }
  return outcome;
}

GbmAttackOutcome RunGbmAttackDetailed(const TargetModel& model, const Dataset& members,
                                      const Dataset& nonmembers,
                                      AttackInterface interface,
                                      std::uint64_t split_seed,
                                      const GbmAttackConfig& config) {
  if (members.rows() == 0 || nonmembers.rows() == 0) {
    throw InsufficientDataError("GBM attack needs nonempty member and nonmember sets");
  }
  const TargetOutputs mo = ComputeOutputs(model, members.features);
  const TargetOutputs no = ComputeOutputs(model, nonmembers.features);
  const bool probs = interface == AttackInterface::kProbs;
  auto to_rows = [&](const TargetOutputs& o) -> RowMatrix {
    return probs ? RowMatrix(o.posteriors) : RowMatrix(o.logits);
  };
  std::vector<int> mi(members.labels.size()), ni(nonmembers.labels.size());
  std::transform(members.labels.begin(), members.labels.end(), mi.begin(), ClassIndex);
  std::transform(nonmembers.labels.begin(), nonmembers.labels.end(), ni.begin(),
                 ClassIndex);
  return RunGbmAttackOnOutputs(to_rows(mo), mi, to_rows(no), ni, interface, split_seed,
                               config);
}

AttackScores RunGbmAttack(const TargetModel& model, const Dataset& members,
                          const Dataset& nonmembers, AttackInterface interface,
                          std::uint64_t split_seed) {
  return RunGbmAttackDetailed(model, members, nonmembers, interface, split_seed).scores;
}

AttackScores SubsetScores(const AttackScores& scores, const std::vector<int>& member_rows,
                          const std::vector<int>& nonmember_rows) {
  AttackScores out;
  out.kind = scores.kind;
  out.orientation = scores.orientation;
  for (int r : member_rows) out.member_scores.push_back(scores.member_scores.at(r));
  for (int r : nonmember_rows) out.nonmember_scores.push_back(scores.nonmember_scores.at(r));
  return out;
}

void WriteAttackScoresCsv(const AttackScores& scores, std::ostream& out) {
  const std::string_view kind = ScoreKindName(scores.kind);
  char buf[40];
  out << "side,score,kind\n";
  for (double s : scores.member_scores) {
    std::snprintf(buf, sizeof(buf), "%.17g", s);
    out << "member," << buf << ',' << kind << '\n';
  }
  for (double s : scores.nonmember_scores) {
    std::snprintf(buf, sizeof(buf), "%.17g", s);
    out << "nonmember," << buf << ',' << kind << '\n';
  }
}

}  // namespace mialab
