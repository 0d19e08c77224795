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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mialab/datagen.hpp"
#include "mialab/errors.hpp"
#include "mialab/metrics.hpp"
#include "mialab/rng.hpp"

namespace mialab {
namespace {

constexpr double kLn2 = std::numbers::ln2;

TEST(ScoreTest, MaxProb) {
  EXPECT_DOUBLE_EQ(ScoreMaxProb(std::vector<double>{0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(ScoreMaxProb(std::vector<double>{0.9, 0.1}), 0.9);
  EXPECT_DOUBLE_EQ(ScoreMaxProb(std::vector<double>(5, 0.2)), 0.2);
  EXPECT_THROW(ScoreMaxProb(std::vector<double>{0.6, 0.6}), ValidationError);
}

TEST(ScoreTest, Entropy) {
  EXPECT_DOUBLE_EQ(ScoreEntropy(std::vector<double>{1.0, 0.0}), 0.0);
  EXPECT_NEAR(ScoreEntropy(std::vector<double>{0.5, 0.5}), kLn2, 1e-15);
  EXPECT_NEAR(ScoreEntropy(std::vector<double>{0.9, 0.1}),
              -0.9 * std::log(0.9) - 0.1 * std::log(0.1), 1e-15);
  EXPECT_NEAR(ScoreEntropy(std::vector<double>{0.9, 0.1}), 0.3251, 5e-5);
  EXPECT_THROW(ScoreEntropy(std::vector<double>{0.2, 0.2}), ValidationError);
}

TEST(ScoreTest, LogLoss) {
  EXPECT_DOUBLE_EQ(ScoreLogLoss(std::vector<double>{0.0, 1.0}, 1), 0.0);
  EXPECT_NEAR(ScoreLogLoss(std::vector<double>{0.5, 0.5}, 0), kLn2, 1e-15);
  const double p = std::exp(-2.0);
  EXPECT_NEAR(ScoreLogLoss(std::vector<double>{p, 1 - p}, 0), 2.0, 1e-14);
  EXPECT_THROW(ScoreLogLoss(std::vector<double>{0.5, 0.5}, 2), ValidationError);
}

TEST(ScoreTest, LdaLogJointIsShiftEquivariantMax) {
  EXPECT_EQ(ScoreLdaLogJoint(std::vector<double>{-1.0, -3.0}), -1.0);
  EXPECT_EQ(ScoreLdaLogJoint(std::vector<double>{-1.0 + 7.5, -3.0 + 7.5}), -1.0 + 7.5);
}

TEST(ScoreTest, CorrectPrediction) {
  EXPECT_EQ(ScoreCorrectPrediction(std::vector<double>{0.2, 0.8}, 1), 1.0);
  EXPECT_EQ(ScoreCorrectPrediction(std::vector<double>{0.2, 0.8}, 0), 0.0);
}

TEST(ScoreTest, Orientations) {
  EXPECT_EQ(ScoreOrientation(ScoreKind::kMaxProb), Orientation::kHigherIsMember);
  EXPECT_EQ(ScoreOrientation(ScoreKind::kEntropy), Orientation::kLowerIsMember);
  EXPECT_EQ(ScoreOrientation(ScoreKind::kLogLoss), Orientation::kLowerIsMember);
  EXPECT_EQ(ScoreOrientation(ScoreKind::kLdaLogJoint), Orientation::kHigherIsMember);
  EXPECT_EQ(ScoreOrientation(ScoreKind::kGbmProbs), Orientation::kHigherIsMember);
  for (ScoreKind k : kAllScoreKinds) {
    EXPECT_EQ(ParseScoreKind(ScoreKindName(k)), k);
  }
  EXPECT_FALSE(ParseScoreKind("bogus").has_value());
}

TEST(AttackFeaturesTest, ConcatenatesOneHot) {
  const std::vector<double> row =
      BuildAttackFeatures(std::vector<double>{0.7, 0.3}, 1, AttackInterface::kProbs);
  EXPECT_EQ(row, (std::vector<double>{0.7, 0.3, 0.0, 1.0}));
  EXPECT_THROW(BuildAttackFeatures(std::vector<double>{0.7, 0.3}, 2,
                                   AttackInterface::kProbs),
               ValidationError);
  // Injective in (outputs, label).
  EXPECT_NE(BuildAttackFeatures(std::vector<double>{0.7, 0.3}, 0, AttackInterface::kProbs),
            row);
}

Dataset Toy(int d, int n, double mu, std::uint64_t seed, Split split) {
  GenParams p;
  p.d = d;
  p.n_train = n;
  p.mu = mu;
  p.seed = seed;
  return GenerateDataset(p, split);
}

TEST(TargetOutputsTest, InterfacesUseModelQuantities) {
  const Dataset train = Toy(8, 200, 0.3, 1, Split::kTrain);
  const LdaModel lda = FitLda(train);
  const TargetOutputs lo = ComputeOutputs(lda, train.features);
  const LogisticModel lr = FitLogistic(train);
  const TargetOutputs ro = ComputeOutputs(lr, train.features);
  for (int i = 0; i < 10; ++i) {
    const ClassPair lj = LogJoint(lda, train.features.row(i).transpose());
    EXPECT_NEAR(lo.logits(i, 0), lj[0], 1e-9);
    EXPECT_NEAR(lo.logits(i, 1), lj[1], 1e-9);
    const ClassPair pp = Posterior(lr, train.features.row(i).transpose());
    EXPECT_NEAR(ro.posteriors(i, 0), pp[0], 1e-12);
    EXPECT_NEAR(ro.posteriors(i, 1), pp[1], 1e-12);
    EXPECT_EQ(ro.logits(i, 0), 0.0);
    EXPECT_NEAR(ro.logits(i, 1), LogisticLogit(lr, train.features.row(i).transpose()),
                1e-12);
  }
}

TEST(ThresholdAttackTest, EntropyAndMaxProbAurocAgree) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Dataset train = Toy(16, 200, 0.2, seed, Split::kTrain);
    const Dataset test = Toy(16, 200, 0.2, seed, Split::kTest);
    for (const TargetModel model :
         {TargetModel(FitLda(train)), TargetModel(FitLogistic(train))}) {
      const double a = Auroc(ThresholdAttack(model, train, test, ScoreKind::kEntropy));
      const double b = Auroc(ThresholdAttack(model, train, test, ScoreKind::kMaxProb));
      EXPECT_DOUBLE_EQ(a, b);
    }
  }
}

TEST(ThresholdAttackTest, LogJointSeparatesMembersAtHighDimension) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset train = Toy(64, 50, 0.3, seed, Split::kTrain);
    const Dataset test = Toy(64, 50, 0.3, seed, Split::kTest);
    const AttackScores s =
        ThresholdAttack(FitLda(train), train, test, ScoreKind::kLdaLogJoint);
    double mm = 0, nm = 0;
    for (double v : s.member_scores) mm += v / s.member_scores.size();
    for (double v : s.nonmember_scores) nm += v / s.nonmember_scores.size();
    EXPECT_GT(mm, nm) << "seed " << seed;
  }
}

TEST(ThresholdAttackTest, LogJointNeedsLda) {
  const Dataset train = Toy(4, 50, 0.3, 0, Split::kTrain);
  EXPECT_THROW(ThresholdAttack(FitLogistic(train), train, train, ScoreKind::kLdaLogJoint),
               ValidationError);
}

TEST(GbmAttackTest, MemorizedTargetIsDetected) {
  // Members get the true class with certainty; nonmembers get a coin flip.
  const int n = 200;
  RowMatrix mem(n, 2), non(n, 2);
  std::vector<int> mi(n), ni(n);
  Rng rng(5);
  for (int i = 0; i < n; ++i) {
    mi[i] = static_cast<int>(rng.Index(2));
    ni[i] = static_cast<int>(rng.Index(2));
    mem(i, mi[i]) = 1.0;
    mem(i, 1 - mi[i]) = 0.0;
    const double p = 0.5 + 0.02 * (rng.Uniform() - 0.5);
    non(i, 0) = p;
    non(i, 1) = 1 - p;
  }
  const GbmAttackOutcome out =
      RunGbmAttackOnOutputs(mem, mi, non, ni, AttackInterface::kProbs, 11);
  EXPECT_GE(Auroc(out.scores), 0.95);
  EXPECT_EQ(out.scores.member_scores.size(), 100u);
  EXPECT_EQ(out.scores.nonmember_scores.size(), 100u);
  EXPECT_EQ(out.scores.orientation, Orientation::kHigherIsMember);
}

TEST(GbmAttackTest, NullCalibration) {
  const int n = 2000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(100 + seed);
    RowMatrix mem(n, 2), non(n, 2);
    std::vector<int> mi(n), ni(n);
    for (int i = 0; i < n; ++i) {
      const double a = rng.Uniform(), b = rng.Uniform();
      mem(i, 0) = a, mem(i, 1) = 1 - a;
      non(i, 0) = b, non(i, 1) = 1 - b;
      mi[i] = static_cast<int>(rng.Index(2));
      ni[i] = static_cast<int>(rng.Index(2));
    }
    const GbmAttackOutcome out =
        RunGbmAttackOnOutputs(mem, mi, non, ni, AttackInterface::kProbs, seed);
    EXPECT_NEAR(Auroc(out.scores), 0.5, 0.07) << "seed " << seed;
  }
}

TEST(GbmAttackTest, BalancesPoolsAndSplitsDeterministically) {
  const Dataset train = Toy(8, 50, 0.3, 2, Split::kTrain);
  const Dataset test = Toy(8, 50, 0.3, 2, Split::kTest);
  const LdaModel lda = FitLda(train);
  const GbmAttackOutcome a =
      RunGbmAttackDetailed(lda, train, test, AttackInterface::kLogits, 3);
  const GbmAttackOutcome b =
      RunGbmAttackDetailed(lda, train, test, AttackInterface::kLogits, 3);
  EXPECT_EQ(a.scores.member_scores, b.scores.member_scores);
  EXPECT_EQ(a.eval_members, b.eval_members);
  EXPECT_EQ(a.scores.member_scores.size(), a.scores.nonmember_scores.size());
  EXPECT_EQ(a.scores.member_scores.size(), 25u);
}

TEST(GbmAttackTest, NeedsFourPerSide) {
  RowMatrix three(3, 2);
  three << 0.5, 0.5, 0.4, 0.6, 0.3, 0.7;
  const std::vector<int> idx{0, 1, 1};
  EXPECT_THROW(RunGbmAttackOnOutputs(three, idx, three, idx, AttackInterface::kProbs, 0),
               InsufficientDataError);
}

TEST(GbmAttackTest, ProbsAtLeastLogLossOnOverfitLogistic) {
  // Unregularized logistic regression with n < d memorizes its training set.
  double gbm = 0, loss = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset train = Toy(64, 32, 0.5, seed, Split::kTrain);
    GenParams p = train.params;
    p.n_test = 32;
    const Dataset test = GenerateDataset(p, Split::kTest);
    const LogisticModel lr = FitLogistic(train);
    const GbmAttackOutcome g =
        RunGbmAttackDetailed(lr, train, test, AttackInterface::kProbs, seed);
    const AttackScores ll = SubsetScores(
        ThresholdAttack(lr, train, test, ScoreKind::kLogLoss), g.eval_members,
        g.eval_nonmembers);
    gbm += Auroc(g.scores) / 5;
    loss += Auroc(ll) / 5;
  }
  EXPECT_GE(gbm, loss);
}

TEST(AttackScoresCsvTest, Format) {
  AttackScores s;
  s.member_scores = {0.9};
  s.nonmember_scores = {0.25};
  s.kind = ScoreKind::kEntropy;
  s.orientation = Orientation::kLowerIsMember;
  std::ostringstream out;
  WriteAttackScoresCsv(s, out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "side,score,kind");
  EXPECT_NE(text.find("member,0.9"), std::string::npos);
  EXPECT_NE(text.find("nonmember,0.25"), std::string::npos);
  EXPECT_NE(text.find("entropy"), std::string::npos);
}

}  // namespace
}  // namespace mialab
