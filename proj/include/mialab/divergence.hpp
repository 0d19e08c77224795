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

#ifndef MIALAB_DIVERGENCE_HPP_
#define MIALAB_DIVERGENCE_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mialab/rng.hpp"

namespace mialab {

// Exact finite joint law over X x Y.
class DiscreteJoint {
 public:
  // Entries must be >= 0 and sum to 1 within 1e-12.
  explicit DiscreteJoint(Eigen::MatrixXd table);

  int x_size() const { return static_cast<int>(table_.rows()); }
  int y_size() const { return static_cast<int>(table_.cols()); }
  const Eigen::MatrixXd& table() const { return table_; }
  double operator()(int x, int y) const { return table_(x, y); }

  std::vector<double> Flattened() const;  // index x * y_size + y
  std::vector<double> MarginalX() const;
  // P(.|x); empty when P_X(x) = 0.
  std::vector<double> Conditional(int x) const;

 private:
  Eigen::MatrixXd table_;
};

// A measurable map from (x, y) cells to a finite outcome set.
class ScoreChannel {
 public:
  ScoreChannel(int x_size, int y_size, std::vector<int> outcome, int outcome_size);

  static ScoreChannel FromFunction(int x_size, int y_size,
                                   const std::function<int(int, int)>& map);
  static ScoreChannel Identity(int x_size, int y_size);
  static ScoreChannel Constant(int x_size, int y_size);
  // Cells with bit-identical values share an outcome.
  static ScoreChannel FromValues(int x_size, int y_size, std::span<const double> values);
  // x-only channel exposing the row vector scores(x, .); rows equal within tol
  // share an outcome.
  static ScoreChannel RowVector(const Eigen::MatrixXd& scores, double tol = 1e-9);
  // x-only channel exposing the row vector modulo a common additive shift,
  // i.e. softmax(scores(x, .)).
  static ScoreChannel SoftmaxQuotient(const Eigen::MatrixXd& scores, double tol = 1e-9);

  int x_size() const { return x_size_; }
  int y_size() const { return y_size_; }
  int outcome_size() const { return outcome_size_; }
  int operator()(int x, int y) const { return outcome_[x * y_size_ + y]; }
  bool IsInjective() const;
  // True when this channel is a deterministic function of `finer`.
  bool IsCoarseningOf(const ScoreChannel& finer) const;

 private:
  int x_size_;
  int y_size_;
  std::vector<int> outcome_;
  int outcome_size_;
};

// 1/2 sum |p - q|. Both inputs must be probability vectors (within 1e-9).
double Tv(std::span<const double> p, std::span<const double> q);
// sum p log(p / q), 0 log(0 / q) = 0, +infinity when p > 0 = q.
double Kl(std::span<const double> p, std::span<const double> q);

struct BoundsReport {
  double tv_joint = 0.0;
  double tv_marginal = 0.0;
  double exp_cond_tv = 0.0;   // E_{x~P_X} TV(P(.|x), Q(.|x))
  double kl_x = 0.0;
  double exp_kl_cond = 0.0;   // E_{x~P_X} KL(P(.|x) || Q(.|x)), may be inf
  double lower = 0.0;         // |tv_marginal - exp_cond_tv|
  double upper = 0.0;         // tv_marginal + exp_cond_tv
  double pinsker_upper = 0.0; // sqrt(kl_x / 2) + sqrt(exp_kl_cond / 2)
};

// Two-way marginal/conditional decomposition of TV(P_XY, Q_XY). Rows with
// P_X(x) = 0 contribute nothing to the expectations. Where Q_X(x) = 0 but
// P_X(x) > 0 the Q conditional is taken as uniform for the TV terms (any
// choice keeps both bounds valid) and the KL term is +infinity.
BoundsReport Decompose(const DiscreteJoint& p, const DiscreteJoint& q);

std::vector<double> Pushforward(const DiscreteJoint& joint, const ScoreChannel& channel);

struct DpiResult {
  double tv_before = 0.0;
  double tv_after = 0.0;
};

// tv_before is measured through `finer` (identity by default), tv_after
// through `coarser`, which must be a function of `finer`.
DpiResult DpiCheck(const DiscreteJoint& p, const DiscreteJoint& q,
                   const ScoreChannel& coarser);
DpiResult DpiCheck(const DiscreteJoint& p, const DiscreteJoint& q,
                   const ScoreChannel& finer, const ScoreChannel& coarser);

// (log beta - log alpha) / (1 + log beta - log alpha); needs 0 < alpha <= beta.
double CCoeff(double alpha, double beta);

struct LrConstants {
  double alpha = 1.0;
  double beta = 1.0;
};

// Min and max of P(y|x) / Q(y|x) over x with P_X(x) > 0 and labels where
// either conditional is positive. Throws UnboundedRatioError when a ratio is
// 0 or infinite.
LrConstants ComputeLrConstants(const DiscreteJoint& p, const DiscreteJoint& q);

struct DominanceRecord {
  double kl_x = 0.0;
  double exp_kl_cond = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double c = 0.0;
  bool condition_holds = false;       // c * kl_x > exp_kl_cond
  double adv_scalar_joint_lb = 0.0;   // sqrt(max(0, c kl_x - exp_kl_cond) / 2)
  double adv_cond_ub = 0.0;           // sqrt(kl_x / 2) + sqrt(exp_kl_cond / 2)
  // Exact TV of the pushforwards of P and Q through the scalar log P(x, y)
  // and through the scalar conditional P(y|x).
  double scalar_joint_tv = 0.0;
  double scalar_cond_tv = 0.0;
};

// The target model is P: the scalar channels read log P(x, y) and P(y | x).
DominanceRecord DominanceProbe(const DiscreteJoint& p, const DiscreteJoint& q);

// Dirichlet(1, ..., 1) over the flattened table.
DiscreteJoint RandomJoint(int x_size, int y_size, Rng& rng);

// Instance for the joint-vector vs softmax-quotient comparison. The exposed
// scores are log M(x, y) with M(x, y) = m(x) pi_{g(x)}(y): rows in one group
// share a posterior but have distinct normalizers. With matched_normalizer,
// Q_X(x) = P_X(x) r_{g(x)} / Z so the normalizer carries no membership
// information beyond the posterior, and the quotient is sufficient.
struct SoftmaxInstance {
  DiscreteJoint p;
  DiscreteJoint q;
  Eigen::MatrixXd log_scores;
  std::vector<int> group;
};

SoftmaxInstance RandomSoftmaxInstance(int x_size, int y_size, int groups,
                                      bool matched_normalizer, Rng& rng);

struct CertificationRow {
  BoundsReport bounds;
  DpiResult chain;          // identity vs a random coarsening
  DominanceRecord dominance;
  bool sandwich_ok = true;
  bool pinsker_ok = true;   // vacuous (true) when a KL term is infinite
  bool chain_ok = true;
  bool dominance_ok = true; // vacuous when the condition fails
};

struct CertificationSummary {
  std::vector<CertificationRow> rows;
  int sandwich_violations = 0;
  int pinsker_violations = 0;
  int chain_violations = 0;
  int dominance_violations = 0;
  int dominance_condition_count = 0;
  int total_violations() const {
    return sandwich_violations + pinsker_violations + chain_violations +
           dominance_violations;
  }
};

inline constexpr double kCertifyTolerance = 1e-12;

// Randomized certification over `trials` Dirichlet pairs on x_size x y_size.
CertificationSummary CertifyBounds(int trials, int x_size, int y_size,
                                   std::uint64_t seed);

// One line per trial with the bound fields and per-check flags (%.17g).
void WriteCertificationCsv(const CertificationSummary& summary, std::ostream& out);

}  // namespace mialab

#endif  // MIALAB_DIVERGENCE_HPP_
