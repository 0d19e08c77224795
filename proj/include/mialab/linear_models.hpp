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

#ifndef MIALAB_LINEAR_MODELS_HPP_
#define MIALAB_LINEAR_MODELS_HPP_

#include <array>
#include <string>

#include <Eigen/Dense>

#include "mialab/datagen.hpp"
#include <nlohmann/json.hpp>

namespace mialab {

// Probabilities indexed by class: [0] is y = -1, [1] is y = +1. The same
// index convention is used for log-joint vectors and one-hot labels.
using ClassPair = std::array<double, 2>;

inline int ClassIndex(int label) { return label > 0 ? 1 : 0; }
inline int IndexLabel(int index) { return index == 1 ? 1 : -1; }

struct LogisticOptions {
  double tol = 1e-8;       // on the gradient infinity-norm of the mean loss
  int max_iter = 10000;
  // Objective is mean NLL + l2 / (2 n) * ||weights||^2, i.e. l2 = 1 / C in
  // the usual C-parameterization. The intercept is never penalized.
  double l2 = 0.0;
  int history = 10;        // L-BFGS memory
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  bool converged = false;
  int iterations = 0;
  double l2 = 0.0;

  int dim() const { return static_cast<int>(weights.size()); }
};

// L-BFGS with Armijo backtracking. Separable data may stop at the iteration
// cap with converged = false; that is a result, not an error.
LogisticModel FitLogistic(const Dataset& train, const LogisticOptions& options);
LogisticModel FitLogistic(const Dataset& train, double tol = 1e-8,
                          int max_iter = 10000);

// Objective value and gradient (weights first, bias last) at (weights, bias).
// Exposed so tests can check the optimum against finite differences.
double LogisticObjective(const Dataset& train, const Eigen::VectorXd& weights,
                         double bias, double l2, Eigen::VectorXd* gradient);

double LogisticLogit(const LogisticModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
ClassPair LogitPosterior(double logit);
ClassPair Posterior(const LogisticModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
// Logits w.x + b for every row.
Eigen::VectorXd LogisticLogits(const LogisticModel& model, const RowMatrix& x);

struct LdaModel {
  double prior_pos = 0.5;
  Eigen::VectorXd mean_pos;
  Eigen::VectorXd mean_neg;
  Eigen::MatrixXd shrunk_covariance;
  Eigen::MatrixXd cholesky_lower;  // shrunk_covariance = L L^T
  double shrinkage_intensity = 0.0;  // prior-weighted mean over classes
  double log_det = 0.0;
  // L^{-1} mean, cached for scoring.
  Eigen::VectorXd whitened_mean_pos;
  Eigen::VectorXd whitened_mean_neg;

  double prior_neg() const { return 1.0 - prior_pos; }
  int dim() const { return static_cast<int>(mean_pos.size()); }
};

struct ShrunkCovariance {
  Eigen::MatrixXd covariance;
  double shrinkage = 0.0;
  double target_scale = 0.0;  // trace(S) / d
};

// Ledoit-Wolf shrinkage of the empirical covariance X^T X / n of already
// centered rows toward (trace(S) / d) I.
ShrunkCovariance LedoitWolf(const RowMatrix& centered);

// Per-class covariance in the scikit-learn "shrinkage=auto" style: rows are
// centered and scaled to unit variance per column, shrunk with Ledoit-Wolf
// toward the identity, then scaled back. Constant columns keep scale 1.
ShrunkCovariance StandardizedLedoitWolf(const RowMatrix& rows);

// Priors and means are empirical; the covariance is the prior-weighted sum
// of the per-class StandardizedLedoitWolf estimates.
LdaModel FitLda(const Dataset& train);
// Rebuild derived fields (Cholesky factor, log_det, whitened means) after the
// priors, means and covariance have been set.
void FinalizeLda(LdaModel& model);

// [log P(-1) + log N(x | mean_neg, S), log P(+1) + log N(x | mean_pos, S)]
ClassPair LogJoint(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
ClassPair Posterior(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
// n x 2 log-joint table for every row (one triangular solve for the batch).
Eigen::MatrixX2d LogJointBatch(const LdaModel& model, const RowMatrix& x);
ClassPair SoftmaxPair(const ClassPair& scores);

// Argmax of the posterior; an exact tie goes to +1.
int PredictFromPosterior(const ClassPair& posterior);
int Predict(const LogisticModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
int Predict(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
double Accuracy(const LogisticModel& model, const Dataset& data);
double Accuracy(const LdaModel& model, const Dataset& data);

// Per-row posteriors for a whole dataset, n x 2.
Eigen::MatrixX2d PosteriorBatch(const LogisticModel& model, const RowMatrix& x);
Eigen::MatrixX2d PosteriorBatch(const LdaModel& model, const RowMatrix& x);

// JSON model files. Logistic: {"type":"logistic","weights",...}. LDA stores
// priors, means, the lower Cholesky factor of the shrunk covariance and the
// shrinkage intensity.
nlohmann::json ToJson(const LogisticModel& model);
nlohmann::json ToJson(const LdaModel& model);
LogisticModel LogisticFromJson(const nlohmann::json& j);
LdaModel LdaFromJson(const nlohmann::json& j);

}  // namespace mialab

#endif  // MIALAB_LINEAR_MODELS_HPP_
