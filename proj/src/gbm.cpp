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

#include "mialab/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "mialab/errors.hpp"

namespace mialab {

namespace {

constexpr double kHessianFloor = 1e-12;

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

std::string G17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class TreeBuilder {
 public:
  TreeBuilder(const RowMatrix& x, std::span<const double> residuals,
              std::span<const double> hessians, int max_depth)
      : x_(x), residuals_(residuals), hessians_(hessians), max_depth_(max_depth) {}

  RegressionTree Build(std::vector<int> indices) {
    RegressionTree tree;
    Grow(tree, std::move(indices), 0);
    return tree;
  }

 private:
  int Grow(RegressionTree& tree, std::vector<int> indices, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    SplitCandidate split;
    if (depth < max_depth_ && indices.size() >= 2) {
      split = FindBestSplit(x_, residuals_, indices);
    }
    // Nodes whose mean squared deviation is at rounding level are pure.
    const double node_impurity = split.valid ? NodeImpurity(indices) : 0.0;
    const bool pure = node_impurity <= 10.0 * std::numeric_limits<double>::epsilon() *
                                           static_cast<double>(indices.size());
    if (split.valid && !pure && split.impurity < node_impurity * (1.0 - 1e-12)) {
      std::vector<int> left, right;
      for (int i : indices) {
        (x_(i, split.feature) <= split.threshold ? left : right).push_back(i);
      }
      tree.nodes[id].feature = split.feature;
      tree.nodes[id].threshold = split.threshold;
      const int l = Grow(tree, std::move(left), depth + 1);
      const int r = Grow(tree, std::move(right), depth + 1);
      tree.nodes[id].left = l;
      tree.nodes[id].right = r;
      return id;
    }
    double num = 0.0, den = 0.0;
    for (int i : indices) {
      num += residuals_[i];
      den += hessians_[i];
    }
    tree.nodes[id].value = num / std::max(den, kHessianFloor);
    return id;
  }

  double NodeImpurity(const std::vector<int>& indices) const {
    double s = 0.0, ss = 0.0;
    for (int i : indices) {
      s += residuals_[i];
      ss += residuals_[i] * residuals_[i];
    }
    return ss - s * s / indices.size();
  }

  const RowMatrix& x_;
  std::span<const double> residuals_;
  std::span<const double> hessians_;
  int max_depth_;
};

}  // namespace

double RegressionTree::Predict(std::span<const double> row) const {
  int id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& n = nodes[id];
    id = row[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[id].value;
}

int RegressionTree::Depth() const {
  if (nodes.empty()) return 0;
  std::function<int(int)> depth = [&](int id) -> int {
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth(n.left), depth(n.right));
  };
  return depth(0);
}

SplitCandidate FindBestSplit(const RowMatrix& features,
                             std::span<const double> residuals,
                             std::span<const int> indices) {
  SplitCandidate best;
  const std::size_t n = indices.size();
  if (n < 2) return best;
  double total = 0.0, total_sq = 0.0;
  for (int i : indices) {
    total += residuals[i];
    total_sq += residuals[i] * residuals[i];
  }
  // Candidates that tie mathematically can differ by rounding in the
  // incremental formula; only a clear improvement displaces the incumbent so
  // the lowest feature / smallest threshold rule holds.
  const double slack =
      1e-12 * (std::fabs(total_sq - total * total / static_cast<double>(n)) + 1e-300);
  std::vector<int> order(indices.begin(), indices.end());
  for (int f = 0; f < features.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return features(a, f) < features(b, f);
    });
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += residuals[order[k]];
      const double lo = features(order[k], f);
      const double hi = features(order[k + 1], f);
      if (!(lo < hi)) continue;
      const double n_left = static_cast<double>(k + 1);
      const double n_right = static_cast<double>(n - k - 1);
      const double right_sum = total - left_sum;
      const double impurity = std::max(
          0.0, total_sq - left_sum * left_sum / n_left - right_sum * right_sum / n_right);
      if (!best.valid || impurity < best.impurity - slack) {
        double mid = lo + 0.5 * (hi - lo);
        if (!(mid < hi)) mid = lo;
        best.valid = true;
        best.feature = f;
        best.threshold = mid;
        best.impurity = impurity;
      }
    }
  }
  return best;
}

double BinomialDeviance(std::span<const double> raw, const std::vector<int>& labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    total += Softplus(raw[i]) - labels[i] * raw[i];
  }
  return total / raw.size();
}

GbmModel FitGbm(const RowMatrix& features, const std::vector<int>& labels,
                const GbmParams& params, std::uint64_t /*seed*/) {
  const int n = static_cast<int>(features.rows());
  if (n < 2) throw InsufficientDataError("GBM needs at least 2 samples");
  if (features.cols() < 1) throw ShapeError("GBM needs at least one feature");
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeError("GBM label count does not match feature rows");
  }
  if (params.n_estimators < 0 || params.max_depth < 1) {
    throw ValidationError("GBM needs n_estimators >= 0 and max_depth >= 1");
  }
  if (!features.allFinite()) throw ValidationError("GBM features must be finite");
  int pos = 0;
  for (int y : labels) {
    if (y != 0 && y != 1) throw ValidationError("GBM labels must be 0 or 1");
    pos += y;
  }
  if (pos == 0 || pos == n) {
    throw DegenerateDataError("GBM needs both labels present");
  }

  GbmModel model;
  model.learning_rate = params.learning_rate;
  model.n_estimators = params.n_estimators;
  model.max_depth = params.max_depth;
  model.n_features = static_cast<int>(features.cols());
  const double rate = static_cast<double>(pos) / n;
  model.base_score = std::log(rate / (1.0 - rate));

  std::vector<double> raw(n, model.base_score);
  std::vector<double> residuals(n), hessians(n);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  model.train_deviance.push_back(BinomialDeviance(raw, labels));
  for (int stage = 0; stage < params.n_estimators; ++stage) {
    for (int i = 0; i < n; ++i) {
      const double p = Sigmoid(raw[i]);
      residuals[i] = labels[i] - p;
      hessians[i] = p * (1.0 - p);
    }
    TreeBuilder builder(features, residuals, hessians, params.max_depth);
    RegressionTree tree = builder.Build(all);
    for (int i = 0; i < n; ++i) {
      raw[i] += params.learning_rate *
                tree.Predict({features.row(i).data(),
                              static_cast<std::size_t>(features.cols())});
    }
    model.trees.push_back(std::move(tree));
    model.train_deviance.push_back(BinomialDeviance(raw, labels));
  }
  return model;
}

double GbmRawScore(const GbmModel& model, std::span<const double> row) {
  if (static_cast<int>(row.size()) != model.n_features) {
    throw ShapeError("GBM input width " + std::to_string(row.size()) +
                     " does not match training width " +
                     std::to_string(model.n_features));
  }
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.Predict(row);
  return model.base_score + model.learning_rate * sum;
}

double GbmPredict(const GbmModel& model, std::span<const double> row) {
  return Sigmoid(GbmRawScore(model, row));
}

std::vector<double> GbmPredictBatch(const GbmModel& model, const RowMatrix& x) {
  std::vector<double> out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = GbmPredict(model, {x.row(i).data(), static_cast<std::size_t>(x.cols())});
  }
  return out;
}

void WriteGbmText(const GbmModel& model, std::ostream& out) {
  out << "gbm v1\n"
      << "n_features " << model.n_features << '\n'
      << "n_estimators " << model.n_estimators << '\n'
      << "max_depth " << model.max_depth << '\n'
      << "learning_rate " << G17(model.learning_rate) << '\n'
      << "base_score " << G17(model.base_score) << '\n'
      << "trees " << model.trees.size() << '\n';
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    std::function<void(int)> emit = [&](int id) {
      const TreeNode& n = tree.nodes[id];
      if (n.is_leaf()) {
        out << "leaf " << G17(n.value) << '\n';
        return;
      }
      out << "split " << n.feature << ' ' << G17(n.threshold) << '\n';
      emit(n.left);
      emit(n.right);
    };
    if (!tree.nodes.empty()) emit(0);
  }
}

GbmModel ReadGbmText(std::istream& in) {
  auto expect = [&](const std::string& key) {
    std::string token;
    if (!(in >> token) || token != key) {
      throw ValidationError("GBM text: expected '" + key + "'");
    }
  };
  auto read_double = [&]() {
    std::string token;
    if (!(in >> token)) throw ValidationError("GBM text: truncated");
    try {
      return std::stod(token);
    } catch (const std::exception&) {
      throw ValidationError("GBM text: bad number '" + token + "'");
    }
  };
  auto read_int = [&]() {
    long long v;
    if (!(in >> v)) throw ValidationError("GBM text: expected integer");
    return v;
  };
  expect("gbm");
  expect("v1");
  GbmModel model;
  expect("n_features");
  model.n_features = static_cast<int>(read_int());
  expect("n_estimators");
  model.n_estimators = static_cast<int>(read_int());
  expect("max_depth");
  model.max_depth = static_cast<int>(read_int());
  expect("learning_rate");
  model.learning_rate = read_double();
  expect("base_score");
  model.base_score = read_double();
  expect("trees");
  const long long tree_count = read_int();
  for (long long t = 0; t < tree_count; ++t) {
    expect("tree");
    const long long count = read_int();
    RegressionTree tree;
    std::function<int()> parse = [&]() -> int {
      if (static_cast<long long>(tree.nodes.size()) >= count) {
        throw ValidationError("GBM text: tree has more nodes than declared");
      }
      const int id = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      std::string kind;
      in >> kind;
      if (kind == "leaf") {
        tree.nodes[id].value = read_double();
      } else if (kind == "split") {
        const int feature = static_cast<int>(read_int());
        if (feature < 0 || feature >= model.n_features) {
          throw ValidationError("GBM text: split feature out of range");
        }
        tree.nodes[id].feature = feature;
        tree.nodes[id].threshold = read_double();
        const int l = parse();
        const int r = parse();
        tree.nodes[id].left = l;
        tree.nodes[id].right = r;
      } else {
        throw ValidationError("GBM text: unknown node kind '" + kind + "'");
      }
      return id;
    };
    if (count > 0) parse();
    if (static_cast<long long>(tree.nodes.size()) != count) {
      throw ValidationError("GBM text: node count mismatch");
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

std::string GbmToText(const GbmModel& model) {
  std::ostringstream out;
  WriteGbmText(model, out);
  return out.str();
}

GbmModel GbmFromText(const std::string& text) {
  std::istringstream in(text);
  return ReadGbmText(in);
}

}  // namespace mialab
