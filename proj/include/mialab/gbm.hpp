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

#ifndef MIALAB_GBM_HPP_
#define MIALAB_GBM_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mialab/datagen.hpp"

namespace mialab {

// Axis-aligned regression tree stored in preorder. Rows with
// x[feature] <= threshold go left.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf output
  int left = -1;
  int right = -1;
  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> row) const;
  int Depth() const;
};

struct GbmParams {
  int n_estimators = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
};

struct GbmModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // initial log-odds
  int n_estimators = 100;
  int max_depth = 3;
  int n_features = 0;
  // Mean binomial deviance on the training set: entry 0 is before any tree,
  // entry k after k stages.
  std::vector<double> train_deviance;
};

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  // Sum of squared residual deviations from the child means.
  double impurity = 0.0;
};

// Best squared-error split of `residuals[indices]` over all features and
// midpoints between consecutive distinct sorted values. Ties keep the lowest
// feature index, then the smallest threshold.
SplitCandidate FindBestSplit(const RowMatrix& features,
                             std::span<const double> residuals,
                             std::span<const int> indices);

// Stage-wise boosting of binomial deviance with Newton leaf values
// sum(r) / max(sum(p (1 - p)), 1e-12). labels are 0/1. No subsampling, so
// the seed does not influence the fit.
GbmModel FitGbm(const RowMatrix& features, const std::vector<int>& labels,
                const GbmParams& params = {}, std::uint64_t seed = 0);

double GbmRawScore(const GbmModel& model, std::span<const double> row);
// sigmoid(base_score + learning_rate * sum of tree outputs)
double GbmPredict(const GbmModel& model, std::span<const double> row);
std::vector<double> GbmPredictBatch(const GbmModel& model, const RowMatrix& x);

// Mean binomial deviance for raw scores `raw` and 0/1 labels.
double BinomialDeviance(std::span<const double> raw, const std::vector<int>& labels);

// Plain-text model: header fields then one `tree <count>` block per tree with
// nodes in preorder as `split <feature> <threshold>` or `leaf <value>`.
// Doubles use %.17g, so a round trip is bit-exact.
void WriteGbmText(const GbmModel& model, std::ostream& out);
GbmModel ReadGbmText(std::istream& in);
std::string GbmToText(const GbmModel& model);
GbmModel GbmFromText(const std::string& text);

}  // namespace mialab

#endif  // MIALAB_GBM_HPP_
