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

#include "mialab/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>

#include "mialab/errors.hpp"

namespace mialab {

namespace {

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void CheckTrainingData(const Dataset& train, int min_per_class) {
  if (train.rows() == 0 || train.cols() == 0) {
    throw DegenerateDataError("training set is empty");
  }
  if (static_cast<int>(train.labels.size()) != train.rows()) {
    throw ShapeError("label count does not match feature rows");
  }
  if (!train.features.allFinite()) {
    throw ValidationError("training features contain non-finite values");
  }
  int pos = 0;
  for (int y : train.labels) {
    if (y != 1 && y != -1) throw ValidationError("labels must be -1 or +1");
    pos += y == 1;
  }
  const int neg = train.rows() - pos;
  if (pos < min_per_class || neg < min_per_class) {
    throw DegenerateDataError(
        "each class needs at least " + std::to_string(min_per_class) +
        " training samples (have " + std::to_string(neg) + " negative, " +
        std::to_string(pos) + " positive)");
  }
}

// Objective over the stacked parameter vector theta = [weights; bias].
double StackedObjective(const Dataset& train, const Eigen::VectorXd& theta,
                        double l2, Eigen::VectorXd* gradient) {
  const int d = train.cols();
  const int n = train.rows();
  const auto w = theta.head(d);
  const double b = theta(d);
  const Eigen::VectorXd z = (train.features * w).array() + b;
  double loss = 0.0;
  Eigen::VectorXd coef(n);
  for (int i = 0; i < n; ++i) {
    const double margin = train.labels[i] * z(i);
    loss += Softplus(-margin);
    coef(i) = -train.labels[i] * Sigmoid(-margin);
  }
  loss /= n;
  loss += 0.5 * l2 / n * w.squaredNorm();
  if (gradient != nullptr) {
    gradient->resize(d + 1);
    gradient->head(d) = train.features.transpose() * coef / n + (l2 / n) * w;
    (*gradient)(d) = coef.sum() / n;
  }
  return loss;
}

}  // namespace

double LogisticObjective(const Dataset& train, const Eigen::VectorXd& weights,
                         double bias, double l2, Eigen::VectorXd* gradient) {
  if (weights.size() != train.cols()) throw ShapeError("weight width mismatch");
  Eigen::VectorXd theta(weights.size() + 1);
  theta << weights, bias;
  return StackedObjective(train, theta, l2, gradient);
}

LogisticModel FitLogistic(const Dataset& train, double tol, int max_iter) {
  LogisticOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return FitLogistic(train, options);
}

LogisticModel FitLogistic(const Dataset& train, const LogisticOptions& options) {
  if (options.max_iter < 1) throw ValidationError("max_iter must be >= 1");
  if (!(options.tol > 0.0)) throw ValidationError("tol must be > 0");
  if (!(options.l2 >= 0.0)) throw ValidationError("l2 must be >= 0");
  CheckTrainingData(train, 1);

  const int d = train.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd grad;
  double f = StackedObjective(train, theta, options.l2, &grad);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  int iter = 0;
  bool converged = grad.lpNorm<Eigen::Infinity>() <= options.tol;
  Eigen::VectorXd theta_new, grad_new;

  while (!converged && iter < options.max_iter) {
    // Two-loop recursion.
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    double gamma;
    if (s_hist.empty()) {
      gamma = 1.0 / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
    } else {
      gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    }
    q *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd direction = -q;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -grad / std::max(1.0, grad.lpNorm<Eigen::Infinity>());
      slope = grad.dot(direction);
    }

    constexpr double kArmijo = 1e-4;
    double step = 1.0;
    bool accepted = false;
    double f_new = f;
    for (int trial = 0; trial < 60; ++trial) {
      theta_new = theta + step * direction;
      f_new = StackedObjective(train, theta_new, options.l2, &grad_new);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iter;
    if (!accepted) {
      if (s_hist.empty()) break;  // No progress possible even along -grad.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    Eigen::VectorXd s = theta_new - theta;
    Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-16 * y.squaredNorm() && sy > 0.0) {
      if (static_cast<int>(s_hist.size()) == options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
    theta.swap(theta_new);
    grad.swap(grad_new);
    f = f_new;
    converged = grad.lpNorm<Eigen::Infinity>() <= options.tol;
  }

  LogisticModel model;
  model.weights = theta.head(d);
  model.bias = theta(d);
  model.converged = converged;
  model.iterations = iter;
  model.l2 = options.l2;
  return model;
}

double LogisticLogit(const LogisticModel& model,
                     const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.weights.size()) throw ShapeError("input width mismatch");
  return model.weights.dot(x) + model.bias;
}

ClassPair LogitPosterior(double logit) {
  return {Sigmoid(-logit), Sigmoid(logit)};
}

ClassPair Posterior(const LogisticModel& model,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  return LogitPosterior(LogisticLogit(model, x));
}

Eigen::VectorXd LogisticLogits(const LogisticModel& model, const RowMatrix& x) {
  if (x.cols() != model.weights.size()) throw ShapeError("input width mismatch");
  return (x * model.weights).array() + model.bias;
}

Eigen::MatrixX2d PosteriorBatch(const LogisticModel& model, const RowMatrix& x) {
  const Eigen::VectorXd z = LogisticLogits(model, x);
  Eigen::MatrixX2d out(z.size(), 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const ClassPair p = LogitPosterior(z(i));
    out(i, 0) = p[0];
    out(i, 1) = p[1];
  }
  return out;
}

ShrunkCovariance LedoitWolf(const RowMatrix& centered) {
  const double n = static_cast<double>(centered.rows());
  const double p = static_cast<double>(centered.cols());
  if (centered.rows() < 1 || centered.cols() < 1) {
    throw DegenerateDataError("Ledoit-Wolf needs a nonempty sample");
  }
  const Eigen::MatrixXd emp = centered.transpose() * centered / n;
  const double trace = emp.trace();
  const double mu = trace / p;
  // sum_i ||x_i||^4
  const double fourth = centered.rowwise().squaredNorm().array().square().sum();
  const double emp_sq = emp.squaredNorm();
  double beta = (fourth / n - emp_sq) / (n * p);
  const double delta = (emp_sq - 2.0 * mu * trace + p * mu * mu) / p;
  beta = std::min(beta, delta);
  ShrunkCovariance out;
  out.shrinkage = beta <= 0.0 ? 0.0 : beta / delta;
  out.target_scale = mu;
  out.covariance = (1.0 - out.shrinkage) * emp;
  out.covariance.diagonal().array() += out.shrinkage * mu;
  return out;
}

ShrunkCovariance StandardizedLedoitWolf(const RowMatrix& rows) {
  if (rows.rows() < 1 || rows.cols() < 1) {
    throw DegenerateDataError("Ledoit-Wolf needs a nonempty sample");
  }
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  RowMatrix z = rows.rowwise() - mean;
  Eigen::VectorXd scale =
      (z.colwise().squaredNorm() / static_cast<double>(rows.rows())).cwiseSqrt().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale(j) > 0.0)) scale(j) = 1.0;
  }
  z = z * scale.cwiseInverse().asDiagonal();
  ShrunkCovariance out = LedoitWolf(z);
  out.covariance = scale.asDiagonal() * out.covariance * scale.asDiagonal();
  out.target_scale = scale.squaredNorm() / static_cast<double>(scale.size());
  return out;
}

void FinalizeLda(LdaModel& model) {
  const int d = model.dim();
  if (model.mean_neg.size() != d || model.shrunk_covariance.rows() != d ||
      model.shrunk_covariance.cols() != d) {
    throw ShapeError("LDA parameter shapes are inconsistent");
  }
  if (!(model.prior_pos > 0.0 && model.prior_pos < 1.0)) {
    throw ValidationError("LDA prior must be in (0, 1)");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(model.shrunk_covariance);
  if (llt.info() != Eigen::Success) {
    throw DegenerateDataError("shrunk covariance is not positive definite");
  }
  model.cholesky_lower = llt.matrixL();
  const auto diag = model.cholesky_lower.diagonal();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw DegenerateDataError("shrunk covariance has a non-positive pivot");
  }
  model.log_det = 2.0 * diag.array().log().sum();
  const auto lower = model.cholesky_lower.triangularView<Eigen::Lower>();
  model.whitened_mean_pos = lower.solve(model.mean_pos);
  model.whitened_mean_neg = lower.solve(model.mean_neg);
}

LdaModel FitLda(const Dataset& train) {
  CheckTrainingData(train, 2);
  const int n = train.rows();
  const int d = train.cols();
  LdaModel model;
  model.mean_pos = Eigen::VectorXd::Zero(d);
  model.mean_neg = Eigen::VectorXd::Zero(d);
  int pos = 0;
  for (int i = 0; i < n; ++i) {
    if (train.labels[i] == 1) {
      model.mean_pos += train.features.row(i).transpose();
      ++pos;
    } else {
      model.mean_neg += train.features.row(i).transpose();
    }
  }
  model.mean_pos /= pos;
  model.mean_neg /= (n - pos);
  model.prior_pos = static_cast<double>(pos) / n;

  RowMatrix pos_rows(pos, d), neg_rows(n - pos, d);
  for (int i = 0, a = 0, b = 0; i < n; ++i) {
    if (train.labels[i] == 1) {
      pos_rows.row(a++) = train.features.row(i);
    } else {
      neg_rows.row(b++) = train.features.row(i);
    }
  }
  const ShrunkCovariance cov_pos = StandardizedLedoitWolf(pos_rows);
  const ShrunkCovariance cov_neg = StandardizedLedoitWolf(neg_rows);
  ShrunkCovariance shrunk;
  shrunk.covariance = model.prior_pos * cov_pos.covariance +
                      model.prior_neg() * cov_neg.covariance;
  shrunk.shrinkage =
      model.prior_pos * cov_pos.shrinkage + model.prior_neg() * cov_neg.shrinkage;
  shrunk.target_scale =
      model.prior_pos * cov_pos.target_scale + model.prior_neg() * cov_neg.target_scale;
  if (!(shrunk.covariance.diagonal().array() > 0.0).all()) {
    throw DegenerateDataError("pooled within-class covariance is singular");
  }
  model.shrunk_covariance = std::move(shrunk.covariance);
  model.shrinkage_intensity = shrunk.shrinkage;
  FinalizeLda(model);
  return model;
}

ClassPair SoftmaxPair(const ClassPair& scores) {
  const double m = std::max(scores[0], scores[1]);
  const double e0 = std::exp(scores[0] - m);
  const double e1 = std::exp(scores[1] - m);
  const double total = e0 + e1;
  return {e0 / total, e1 / total};
}

ClassPair LogJoint(const LdaModel& model,
                   const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim()) throw ShapeError("input width mismatch");
  const Eigen::VectorXd z =
      model.cholesky_lower.triangularView<Eigen::Lower>().solve(x);
  const double base =
      -0.5 * (model.dim() * std::log(2.0 * std::numbers::pi) + model.log_det);
  const double q_neg = (z - model.whitened_mean_neg).squaredNorm();
  const double q_pos = (z - model.whitened_mean_pos).squaredNorm();
  return {std::log(model.prior_neg()) + base - 0.5 * q_neg,
          std::log(model.prior_pos) + base - 0.5 * q_pos};
}

Eigen::MatrixX2d LogJointBatch(const LdaModel& model, const RowMatrix& x) {
  if (x.cols() != model.dim()) throw ShapeError("input width mismatch");
  const Eigen::MatrixXd z =
      model.cholesky_lower.triangularView<Eigen::Lower>().solve(x.transpose());
  const double base =
      -0.5 * (model.dim() * std::log(2.0 * std::numbers::pi) + model.log_det);
  const double log_neg = std::log(model.prior_neg());
  const double log_pos = std::log(model.prior_pos);
  Eigen::MatrixX2d out(x.rows(), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out(i, 0) = log_neg + base - 0.5 * (z.col(i) - model.whitened_mean_neg).squaredNorm();
    out(i, 1) = log_pos + base - 0.5 * (z.col(i) - model.whitened_mean_pos).squaredNorm();
  }
  return out;
}

ClassPair Posterior(const LdaModel& model,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  return SoftmaxPair(LogJoint(model, x));
}

Eigen::MatrixX2d PosteriorBatch(const LdaModel& model, const RowMatrix& x) {
  Eigen::MatrixX2d out = LogJointBatch(model, x);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const ClassPair p = SoftmaxPair({out(i, 0), out(i, 1)});
    out(i, 0) = p[0];
    out(i, 1) = p[1];
  }
  return out;
}

int PredictFromPosterior(const ClassPair& posterior) {
  return posterior[1] >= posterior[0] ? 1 : -1;
}

int Predict(const LogisticModel& model,
            const Eigen::Ref<const Eigen::VectorXd>& x) {
  return PredictFromPosterior(Posterior(model, x));
}

int Predict(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return PredictFromPosterior(Posterior(model, x));
}

namespace {

double BatchAccuracy(const Eigen::MatrixX2d& posteriors, const Dataset& data) {
  if (data.rows() == 0) throw InsufficientDataError("accuracy of empty dataset");
  int correct = 0;
  for (int i = 0; i < data.rows(); ++i) {
    correct += PredictFromPosterior({posteriors(i, 0), posteriors(i, 1)}) ==
               data.labels[i];
  }
  return static_cast<double>(correct) / data.rows();
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd FromStd(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double Accuracy(const LogisticModel& model, const Dataset& data) {
  return BatchAccuracy(PosteriorBatch(model, data.features), data);
}

double Accuracy(const LdaModel& model, const Dataset& data) {
  return BatchAccuracy(PosteriorBatch(model, data.features), data);
}

nlohmann::json ToJson(const LogisticModel& model) {
  return {{"type", "logistic"},
          {"weights", ToStd(model.weights)},
          {"bias", model.bias},
          {"converged", model.converged},
          {"iterations", model.iterations},
          {"l2", model.l2}};
}

nlohmann::json ToJson(const LdaModel& model) {
  nlohmann::json factor = nlohmann::json::array();
  for (int i = 0; i < model.dim(); ++i) {
    std::vector<double> row(i + 1);
    for (int j = 0; j <= i; ++j) row[j] = model.cholesky_lower(i, j);
    factor.push_back(row);
  }
  return {{"type", "lda"},
          {"prior_pos", model.prior_pos},
          {"mean_pos", ToStd(model.mean_pos)},
          {"mean_neg", ToStd(model.mean_neg)},
          {"shrinkage_intensity", model.shrinkage_intensity},
          {"covariance_factor", factor},
          {"log_det", model.log_det}};
}

LogisticModel LogisticFromJson(const nlohmann::json& j) {
  try {
    if (j.at("type").get<std::string>() != "logistic") {
      throw ValidationError("model JSON is not a logistic model");
    }
    LogisticModel model;
    model.weights = FromStd(j.at("weights").get<std::vector<double>>());
    model.bias = j.at("bias").get<double>();
    model.converged = j.value("converged", false);
    model.iterations = j.value("iterations", 0);
    model.l2 = j.value("l2", 0.0);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed logistic model JSON: ") + e.what());
  }
}

LdaModel LdaFromJson(const nlohmann::json& j) {
  try {
    if (j.at("type").get<std::string>() != "lda") {
      throw ValidationError("model JSON is not an LDA model");
    }
    LdaModel model;
    model.prior_pos = j.at("prior_pos").get<double>();
    model.mean_pos = FromStd(j.at("mean_pos").get<std::vector<double>>());
    model.mean_neg = FromStd(j.at("mean_neg").get<std::vector<double>>());
    model.shrinkage_intensity = j.value("shrinkage_intensity", 0.0);
    const auto& factor = j.at("covariance_factor");
    const int d = model.dim();
    if (static_cast<int>(factor.size()) != d) {
      throw ValidationError("covariance_factor has wrong row count");
    }
    Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      const auto row = factor[i].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != i + 1) {
        throw ValidationError("covariance_factor must be lower triangular rows");
      }
      for (int k = 0; k <= i; ++k) lower(i, k) = row[k];
    }
    model.shrunk_covariance = lower * lower.transpose();
    FinalizeLda(model);
    // Keep the stored factor exactly; the re-factorized one can differ in the
    // last bits.
    model.cholesky_lower = lower;
    model.log_det = 2.0 * lower.diagonal().array().log().sum();
    const auto tri = lower.triangularView<Eigen::Lower>();
    model.whitened_mean_pos = tri.solve(model.mean_pos);
    model.whitened_mean_neg = tri.solve(model.mean_neg);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed LDA model JSON: ") + e.what());
  }
}

}  // namespace mialab
