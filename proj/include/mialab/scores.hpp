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

#ifndef MIALAB_SCORES_HPP_
#define MIALAB_SCORES_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mialab {

enum class ScoreKind {
  kMaxProb,            // max_y p(y|x); higher is member
  kEntropy,            // H(p(.|x)); lower is member
  kLogLoss,            // -log p(true|x); lower is member
  kLdaLogJoint,        // max_y log P(y) + log N(x|mu_y, S); higher is member
  kGbmProbs,           // attack GBM on [posterior || one-hot]; higher
  kGbmLogits,          // attack GBM on [logits || one-hot]; higher
  kCorrectPrediction,  // 1 if argmax matches the label; higher, tie-heavy
};

enum class Orientation { kHigherIsMember, kLowerIsMember };

inline constexpr ScoreKind kAllScoreKinds[] = {
    ScoreKind::kMaxProb,     ScoreKind::kEntropy,  ScoreKind::kLogLoss,
    ScoreKind::kLdaLogJoint, ScoreKind::kGbmProbs, ScoreKind::kGbmLogits,
    ScoreKind::kCorrectPrediction};

std::string_view ScoreKindName(ScoreKind kind);
std::optional<ScoreKind> ParseScoreKind(std::string_view name);
Orientation ScoreOrientation(ScoreKind kind);
std::string_view OrientationName(Orientation orientation);
bool IsGbmKind(ScoreKind kind);

struct AttackScores {
  std::vector<double> member_scores;
  std::vector<double> nonmember_scores;
  ScoreKind kind = ScoreKind::kMaxProb;
  Orientation orientation = Orientation::kHigherIsMember;
};

// Throws ValidationError unless both sides are nonempty and finite.
void ValidateAttackScores(const AttackScores& scores);

}  // namespace mialab

#endif  // MIALAB_SCORES_HPP_
