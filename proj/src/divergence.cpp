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

#include "mialab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "mialab/errors.hpp"

namespace mialab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckDistribution(std::span<const double> p, const char* what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError(std::string(what) + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError(std::string(what) + " is not normalized");
  }
}

void CheckSameShape(const DiscreteJoint& p, const DiscreteJoint& q) {
  if (p.x_size() != q.x_size() || p.y_size() != q.y_size()) {
    throw ShapeError("joint tables have different shapes");
  }
}

// Groups rows of `keys` whose entries agree within tol; returns the group id
// of every row, ids assigned in first-seen order.
std::vector<int> GroupRows(const Eigen::MatrixXd& keys, double tol) {
  std::vector<int> id(keys.rows(), -1);
  int next = 0;
  for (Eigen::Index i = 0; i < keys.rows(); ++i) {
    if (id[i] >= 0) continue;
    id[i] = next;
    for (Eigen::Index j = i + 1; j < keys.rows(); ++j) {
      if (id[j] < 0 && (keys.row(i) - keys.row(j)).cwiseAbs().maxCoeff() <= tol) {
        id[j] = next;
      }
    }
    ++next;
  }
  return id;
}

ScoreChannel XOnlyChannel(int x_size, int y_size, const std::vector<int>& row_group) {
  const int outcomes = row_group.empty()
                           ? 0
                           : *std::max_element(row_group.begin(), row_group.end()) + 1;
  std::vector<int> outcome(static_cast<std::size_t>(x_size) * y_size);
  for (int x = 0; x < x_size; ++x) {
    for (int y = 0; y < y_size; ++y) outcome[x * y_size + y] = row_group[x];
  }
  return ScoreChannel(x_size, y_size, std::move(outcome), outcomes);
}

}  // namespace

DiscreteJoint::DiscreteJoint(Eigen::MatrixXd table) : table_(std::move(table)) {
  if (table_.rows() < 1 || table_.cols() < 1) {
    throw ValidationError("joint table must be nonempty");
  }
  if (!table_.allFinite() || (table_.array() < 0.0).any()) {
    throw ValidationError("joint table entries must be finite and >= 0");
  }
  if (std::abs(table_.sum() - 1.0) > 1e-12) {
    throw ValidationError("joint table must sum to 1");
  }
}

std::vector<double> DiscreteJoint::Flattened() const {
  std::vector<double> out;
  out.reserve(table_.size());
  for (Eigen::Index x = 0; x < table_.rows(); ++x) {
    for (Eigen::Index y = 0; y < table_.cols(); ++y) out.push_back(table_(x, y));
  }
  return out;
}

std::vector<double> DiscreteJoint::MarginalX() const {
  std::vector<double> out(table_.rows());
  for (Eigen::Index x = 0; x < table_.rows(); ++x) out[x] = table_.row(x).sum();
  return out;
}

std::vector<double> DiscreteJoint::Conditional(int x) const {
  const double mass = table_.row(x).sum();
  if (!(mass > 0.0)) return {};
  std::vector<double> out(table_.cols());
  for (Eigen::Index y = 0; y < table_.cols(); ++y) out[y] = table_(x, y) / mass;
  return out;
}

ScoreChannel::ScoreChannel(int x_size, int y_size, std::vector<int> outcome,
                           int outcome_size)
    : x_size_(x_size), y_size_(y_size), outcome_(std::move(outcome)),
      outcome_size_(outcome_size) {
  if (x_size < 1 || y_size < 1) throw ValidationError("channel domain is empty");
  if (static_cast<int>(outcome_.size()) != x_size * y_size) {
    throw ShapeError("channel must map every (x, y) cell");
  }
  for (int o : outcome_) {
    if (o < 0 || o >= outcome_size) throw ValidationError("channel outcome out of range");
  }
}

ScoreChannel ScoreChannel::FromFunction(int x_size, int y_size,
                                        const std::function<int(int, int)>& map) {
  std::vector<int> outcome(static_cast<std::size_t>(x_size) * y_size);
  int size = 0;
  for (int x = 0; x < x_size; ++x) {
    for (int y = 0; y < y_size; ++y) {
      const int o = map(x, y);
      outcome[x * y_size + y] = o;
      size = std::max(size, o + 1);
    }
  }
  return ScoreChannel(x_size, y_size, std::move(outcome), size);
}

ScoreChannel ScoreChannel::Identity(int x_size, int y_size) {
  return FromFunction(x_size, y_size, [y_size](int x, int y) { return x * y_size + y; });
}

ScoreChannel ScoreChannel::Constant(int x_size, int y_size) {
  return FromFunction(x_size, y_size, [](int, int) { return 0; });
}

ScoreChannel ScoreChannel::FromValues(int x_size, int y_size,
                                      std::span<const double> values) {
  if (static_cast<int>(values.size()) != x_size * y_size) {
    throw ShapeError("value table does not cover the channel domain");
  }
  std::map<double, int> ids;
  for (double v : values) ids.emplace(v, 0);
  int next = 0;
  for (auto& [v, id] : ids) id = next++;
  std::vector<int> outcome(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) outcome[i] = ids.at(values[i]);
  return ScoreChannel(x_size, y_size, std::move(outcome), next);
}

ScoreChannel ScoreChannel::RowVector(const Eigen::MatrixXd& scores, double tol) {
  return XOnlyChannel(static_cast<int>(scores.rows()), static_cast<int>(scores.cols()),
                      GroupRows(scores, tol));
}

ScoreChannel ScoreChannel::SoftmaxQuotient(const Eigen::MatrixXd& scores, double tol) {
  // Subtracting the first entry picks a canonical representative of each
  // shift class.
  Eigen::MatrixXd canonical = scores.colwise() - scores.col(0);
  return XOnlyChannel(static_cast<int>(scores.rows()), static_cast<int>(scores.cols()),
                      GroupRows(canonical, tol));
}

bool ScoreChannel::IsInjective() const {
  std::vector<int> sorted = outcome_;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

bool ScoreChannel::IsCoarseningOf(const ScoreChannel& finer) const {
  if (finer.x_size_ != x_size_ || finer.y_size_ != y_size_) return false;
  std::vector<int> image(finer.outcome_size_, -1);
  for (std::size_t i = 0; i < outcome_.size(); ++i) {
    int& slot = image[finer.outcome_[i]];
    if (slot < 0) {
      slot = outcome_[i];
    } else if (slot != outcome_[i]) {
      return false;
    }
  }
  return true;
}

double Tv(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("TV inputs differ in length");
  CheckDistribution(p, "TV input p");
  CheckDistribution(q, "TV input q");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p[i] - q[i]);
  return 0.5 * total;
}

double Kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ValidationError("KL inputs differ in length");
  CheckDistribution(p, "KL input p");
  CheckDistribution(q, "KL input q");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    total += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(total, 0.0);
}

BoundsReport Decompose(const DiscreteJoint& p, const DiscreteJoint& q) {
  CheckSameShape(p, q);
  BoundsReport r;
  r.tv_joint = Tv(p.Flattened(), q.Flattened());
  const std::vector<double> px = p.MarginalX();
  const std::vector<double> qx = q.MarginalX();
  r.tv_marginal = Tv(px, qx);
  r.kl_x = Kl(px, qx);
  const std::vector<double> uniform(p.y_size(), 1.0 / p.y_size());
  for (int x = 0; x < p.x_size(); ++x) {
    if (!(px[x] > 0.0)) continue;
    const std::vector<double> pc = p.Conditional(x);
    std::vector<double> qc = q.Conditional(x);
    if (qc.empty()) {
      r.exp_cond_tv += px[x] * Tv(pc, uniform);
      r.exp_kl_cond = kInf;
      continue;
    }
    r.exp_cond_tv += px[x] * Tv(pc, qc);
    const double kl = Kl(pc, qc);
    r.exp_kl_cond = std::isinf(kl) ? kInf : r.exp_kl_cond + px[x] * kl;
  }
  r.lower = std::abs(r.tv_marginal - r.exp_cond_tv);
  r.upper = r.tv_marginal + r.exp_cond_tv;
  r.pinsker_upper = std::sqrt(r.kl_x / 2.0) + std::sqrt(r.exp_kl_cond / 2.0);
  return r;
}

std::vector<double> Pushforward(const DiscreteJoint& joint, const ScoreChannel& channel) {
  if (channel.x_size() != joint.x_size() || channel.y_size() != joint.y_size()) {
    throw ShapeError("channel does not cover the joint's index set");
  }
  std::vector<double> out(channel.outcome_size(), 0.0);
  for (int x = 0; x < joint.x_size(); ++x) {
    for (int y = 0; y < joint.y_size(); ++y) out[channel(x, y)] += joint(x, y);
  }
  return out;
}

DpiResult DpiCheck(const DiscreteJoint& p, const DiscreteJoint& q,
                   const ScoreChannel& coarser) {
  return DpiCheck(p, q, ScoreChannel::Identity(p.x_size(), p.y_size()), coarser);
}

DpiResult DpiCheck(const DiscreteJoint& p, const DiscreteJoint& q,
                   const ScoreChannel& finer, const ScoreChannel& coarser) {
  CheckSameShape(p, q);
  if (!coarser.IsCoarseningOf(finer)) {
    throw ValidationError("coarser channel is not a function of the finer channel");
  }
  DpiResult r;
  r.tv_before = Tv(Pushforward(p, finer), Pushforward(q, finer));
  r.tv_after = Tv(Pushforward(p, coarser), Pushforward(q, coarser));
  return r;
}

double CCoeff(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(beta) || !(alpha <= beta)) {
    throw ValidationError("c(alpha, beta) needs 0 < alpha <= beta < inf");
  }
  const double gap = std::log(beta) - std::log(alpha);
  return gap / (1.0 + gap);
}

LrConstants ComputeLrConstants(const DiscreteJoint& p, const DiscreteJoint& q) {
  CheckSameShape(p, q);
  LrConstants out{kInf, 0.0};
  bool any = false;
  const std::vector<double> px = p.MarginalX();
  for (int x = 0; x < p.x_size(); ++x) {
    if (!(px[x] > 0.0)) continue;
    const std::vector<double> pc = p.Conditional(x);
    const std::vector<double> qc = q.Conditional(x);
    if (qc.empty()) {
      throw UnboundedRatioError("Q conditional undefined where P_X(x) > 0");
    }
    for (int y = 0; y < p.y_size(); ++y) {
      if (pc[y] == 0.0 && qc[y] == 0.0) continue;
      if (qc[y] == 0.0) throw UnboundedRatioError("P(y|x) > 0 where Q(y|x) = 0");
      if (pc[y] == 0.0) throw UnboundedRatioError("P(y|x) = 0 where Q(y|x) > 0");
      const double ratio = pc[y] / qc[y];
      out.alpha = std::min(out.alpha, ratio);
      out.beta = std::max(out.beta, ratio);
      any = true;
    }
  }
  if (!any) throw UnboundedRatioError("no supported (x, y) cells");
  return out;
}

DominanceRecord DominanceProbe(const DiscreteJoint& p, const DiscreteJoint& q) {
  CheckSameShape(p, q);
  DominanceRecord r;
  const LrConstants lr = ComputeLrConstants(p, q);
  r.alpha = lr.alpha;
  r.beta = lr.beta;
  r.c = CCoeff(lr.alpha, lr.beta);
  const BoundsReport b = Decompose(p, q);
  r.kl_x = b.kl_x;
  r.exp_kl_cond = b.exp_kl_cond;
  r.condition_holds = r.c * r.kl_x > r.exp_kl_cond;
  r.adv_scalar_joint_lb = std::sqrt(0.5 * std::max(0.0, r.c * r.kl_x - r.exp_kl_cond));
  r.adv_cond_ub = std::sqrt(r.kl_x / 2.0) + std::sqrt(r.exp_kl_cond / 2.0);

  const int nx = p.x_size(), ny = p.y_size();
  std::vector<double> joint_score(static_cast<std::size_t>(nx) * ny);
  std::vector<double> cond_score(joint_score.size());
  const std::vector<double> px = p.MarginalX();
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < ny; ++y) {
      const double v = p(x, y);
      joint_score[x * ny + y] = v > 0.0 ? std::log(v) : -kInf;
      cond_score[x * ny + y] = px[x] > 0.0 ? v / px[x] : -1.0;
    }
  }
  const ScoreChannel joint_channel = ScoreChannel::FromValues(nx, ny, joint_score);
  const ScoreChannel cond_channel = ScoreChannel::FromValues(nx, ny, cond_score);
  r.scalar_joint_tv = Tv(Pushforward(p, joint_channel), Pushforward(q, joint_channel));
  r.scalar_cond_tv = Tv(Pushforward(p, cond_channel), Pushforward(q, cond_channel));
  return r;
}

DiscreteJoint RandomJoint(int x_size, int y_size, Rng& rng) {
  const std::vector<double> flat =
      rng.FlatDirichlet(static_cast<std::size_t>(x_size) * y_size);
  Eigen::MatrixXd t(x_size, y_size);
  for (int x = 0; x < x_size; ++x) {
    for (int y = 0; y < y_size; ++y) t(x, y) = flat[x * y_size + y];
  }
  // Renormalize in table order so the sum is 1 to rounding.
  t /= t.sum();
  return DiscreteJoint(std::move(t));
}

SoftmaxInstance RandomSoftmaxInstance(int x_size, int y_size, int groups,
                                      bool matched_normalizer, Rng& rng) {
  if (groups < 1 || groups > x_size) {
    throw ValidationError("groups must be in [1, x_size]");
  }
  std::vector<int> group(x_size);
  for (int x = 0; x < x_size; ++x) {
    group[x] = x < groups ? x : static_cast<int>(rng.Index(groups));
  }
  std::vector<std::vector<double>> posterior(groups);
  for (auto& pi : posterior) pi = rng.FlatDirichlet(y_size);
  const std::vector<double> scale = rng.FlatDirichlet(x_size);
  Eigen::MatrixXd log_scores(x_size, y_size);
  for (int x = 0; x < x_size; ++x) {
    for (int y = 0; y < y_size; ++y) {
      log_scores(x, y) = std::log(scale[x]) + std::log(posterior[group[x]][y]);
    }
  }

  auto build = [&](const std::vector<double>& marginal) {
    Eigen::MatrixXd t(x_size, y_size);
    for (int x = 0; x < x_size; ++x) {
      const std::vector<double> cond = rng.FlatDirichlet(y_size);
      for (int y = 0; y < y_size; ++y) t(x, y) = marginal[x] * cond[y];
    }
    t /= t.sum();
    return DiscreteJoint(std::move(t));
  };
  const std::vector<double> px = rng.FlatDirichlet(x_size);
  std::vector<double> qx;
  if (matched_normalizer) {
    std::vector<double> ratio(groups);
    for (auto& r : ratio) r = 0.5 + 1.5 * rng.Uniform();
    qx.resize(x_size);
    double z = 0.0;
    for (int x = 0; x < x_size; ++x) {
      qx[x] = px[x] * ratio[group[x]];
      z += qx[x];
    }
    for (auto& v : qx) v /= z;
  } else {
    qx = rng.FlatDirichlet(x_size);
  }
  DiscreteJoint p = build(px);
  DiscreteJoint q = build(qx);
  return {std::move(p), std::move(q), std::move(log_scores), std::move(group)};
}

CertificationSummary CertifyBounds(int trials, int x_size, int y_size,
                                   std::uint64_t seed) {
  if (trials < 0) throw ValidationError("trials must be >= 0");
  if (x_size < 2 || y_size < 2) {
    throw ValidationError("certification needs x_size >= 2 and y_size >= 2");
  }
  CertificationSummary summary;
  summary.rows.reserve(trials);
  Rng rng(DeriveSeed(seed, "bounds"));
  const double tol = kCertifyTolerance;
  for (int t = 0; t < trials; ++t) {
    const DiscreteJoint p = RandomJoint(x_size, y_size, rng);
    const DiscreteJoint q = RandomJoint(x_size, y_size, rng);
    CertificationRow row;
    row.bounds = Decompose(p, q);
    const int outcomes = std::max(1, x_size * y_size / 2);
    std::vector<int> map(static_cast<std::size_t>(x_size) * y_size);
    for (auto& m : map) m = static_cast<int>(rng.Index(outcomes));
    const ScoreChannel coarse(x_size, y_size, std::move(map), outcomes);
    row.chain = DpiCheck(p, q, coarse);
    row.dominance = DominanceProbe(p, q);

    const BoundsReport& b = row.bounds;
    row.sandwich_ok = b.tv_joint - b.lower >= -tol && b.upper - b.tv_joint >= -tol;
    row.pinsker_ok = !std::isfinite(b.pinsker_upper) || b.pinsker_upper - b.tv_joint >= -tol;
    row.chain_ok = row.chain.tv_after <= row.chain.tv_before + tol &&
                   row.chain.tv_before <= 1.0 + tol;
    row.dominance_ok = !row.dominance.condition_holds ||
                       row.dominance.scalar_joint_tv >=
                           row.dominance.adv_scalar_joint_lb - tol;
    summary.sandwich_violations += !row.sandwich_ok;
    summary.pinsker_violations += !row.pinsker_ok;
    summary.chain_violations += !row.chain_ok;
    summary.dominance_violations += !row.dominance_ok;
    summary.dominance_condition_count += row.dominance.condition_holds;
    summary.rows.push_back(row);
  }
  return summary;
}

void WriteCertificationCsv(const CertificationSummary& summary, std::ostream& out) {
  out << "trial,tv_joint,tv_marginal,exp_cond_tv,lower,upper,kl_x,exp_kl_cond,"
         "pinsker_upper,chain_before,chain_after,c,condition_holds,scalar_joint_tv,"
         "scalar_joint_lb,sandwich_ok,pinsker_ok,chain_ok,dominance_ok\n";
  char buf[32];
  auto g = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const CertificationRow& r = summary.rows[i];
    const BoundsReport& b = r.bounds;
    out << i << ',' << g(b.tv_joint) << ',' << g(b.tv_marginal) << ','
        << g(b.exp_cond_tv) << ',' << g(b.lower) << ',' << g(b.upper) << ','
        << g(b.kl_x) << ',' << g(b.exp_kl_cond) << ',' << g(b.pinsker_upper) << ','
        << g(r.chain.tv_before) << ',' << g(r.chain.tv_after) << ','
        << g(r.dominance.c) << ',' << r.dominance.condition_holds << ','
        << g(r.dominance.scalar_joint_tv) << ',' << g(r.dominance.adv_scalar_joint_lb)
        << ',' << r.sandwich_ok << ',' << r.pinsker_ok << ',' << r.chain_ok << ','
        << r.dominance_ok << '\n';
  }
}

}  // namespace mialab
