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

#ifndef MIALAB_ATTACKS_HPP_
#define MIALAB_ATTACKS_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mialab/datagen.hpp"
#include "mialab/gbm.hpp"
#include "mialab/linear_models.hpp"
#include "mialab/scores.hpp"

namespace mialab {

// Single-sample scores over a posterior vector of any class count. All use
// natural logs; posteriors must be a probability vector (within 1e-9).
double ScoreMaxProb(std::span<const double> posteriors);
double ScoreEntropy(std::span<const double> posteriors);
double ScoreLogLoss(std::span<const double> posteriors, int true_index);
double ScoreLdaLogJoint(std::span<const double> log_joint);
double ScoreCorrectPrediction(std::span<const double> posteriors, int true_index);

enum class AttackInterface { kProbs, kLogits };

// [outputs || one-hot(true_index)], width 2K.
std::vector<double> BuildAttackFeatures(std::span<const double> outputs,
                                        int true_index, AttackInterface interface);

using TargetModel = std::variant<LogisticModel, LdaModel>;

bool IsLda(const TargetModel& model);

// Per-row outputs of a target model. Logits are [0, w.x + b] for logistic
// regression and the log-joint vector for LDA; log_posteriors are computed in
// log space so that saturated rows keep their resolution.
struct TargetOutputs {
  Eigen::MatrixX2d posteriors;
  Eigen::MatrixX2d log_posteriors;
  Eigen::MatrixX2d logits;
};

TargetOutputs ComputeOutputs(const TargetModel& model, const RowMatrix& features);

// Per-row threshold score of `kind` (not a GBM kind) on `data`.
std::vector<double> ThresholdScores(const TargetModel& model, const Dataset& data,
                                    ScoreKind kind);
// Same, from precomputed outputs.
std::vector<double> ThresholdScores(const TargetOutputs& outputs,
                                    const std::vector<int>& labels, ScoreKind kind);

// Members scored on `members` (the training set), nonmembers on `nonmembers`.
// lda_log_joint requires an LDA target.
AttackScores ThresholdAttack(const TargetModel& model, const Dataset& members,
                             const Dataset& nonmembers, ScoreKind kind);

struct GbmAttackConfig {
  GbmParams gbm{100, 3, 0.1};
};

struct GbmAttackOutcome {
  AttackScores scores;             // on the held-out attack-eval half
  std::vector<int> eval_members;   // row indices into the member dataset
  std::vector<int> eval_nonmembers;
  GbmModel model;
};

// Balances the pools by seeded downsampling, splits each pool 50/50
// (attack-train / attack-eval), fits the attack GBM on the train half and
// returns its membership probabilities on the eval half. Needs at least 4
// samples per side after balancing.
GbmAttackOutcome RunGbmAttackDetailed(const TargetModel& model, const Dataset& members,
                                      const Dataset& nonmembers,
                                      AttackInterface interface,
                                      std::uint64_t split_seed,
                                      const GbmAttackConfig& config = {});
AttackScores RunGbmAttack(const TargetModel& model, const Dataset& members,
                          const Dataset& nonmembers, AttackInterface interface,
                          std::uint64_t split_seed);

// Same protocol on raw output rows (n x K) with labels as class indices.
GbmAttackOutcome RunGbmAttackOnOutputs(const RowMatrix& member_outputs,
                                       const std::vector<int>& member_index,
                                       const RowMatrix& nonmember_outputs,
                                       const std::vector<int>& nonmember_index,
                                       AttackInterface interface,
                                       std::uint64_t split_seed,
                                       const GbmAttackConfig& config = {});

// Rows restricted to `rows`, for threshold baselines on the GBM eval half.
AttackScores SubsetScores(const AttackScores& scores, const std::vector<int>& member_rows,
                          const std::vector<int>& nonmember_rows);

// CSV with columns side,score,kind (side is member or nonmember).
void WriteAttackScoresCsv(const AttackScores& scores, std::ostream& out);

}  // namespace mialab

#endif  // MIALAB_ATTACKS_HPP_
