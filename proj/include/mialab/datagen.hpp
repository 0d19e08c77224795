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

#ifndef MIALAB_DATAGEN_HPP_
#define MIALAB_DATAGEN_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace mialab {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Synthetic core+noise experiment configuration. Column 0 is the core
// feature ~ N(y * mu, sigma^2); columns 1..d-1 are N(0, sigma_noise^2).
struct GenParams {
  int d = 16;
  int n_train = 50;
  int n_test = 4000;
  double mu = 0.3;
  double sigma = 0.15;
  double sigma_noise = 1.0;
  double w = 0.5;          // P(y = +1)
  double epsilon = 0.0;    // Huber contamination probability
  double tau_mult = 10.0;  // contamination scale is tau_mult * sigma_noise
  std::uint64_t seed = 0;

  double Tau() const { return tau_mult * sigma_noise; }
  // Throws ValidationError on any invariant violation.
  void Validate() const;
};

enum class Split { kTrain, kTest };

std::string_view SplitName(Split split);

struct Dataset {
  RowMatrix features;                 // n x d
  std::vector<int> labels;            // values in {-1, +1}
  std::vector<bool> contaminated_mask;
  GenParams params;

  int rows() const { return static_cast<int>(features.rows()); }
  int cols() const { return static_cast<int>(features.cols()); }
  // Fraction of rows with mask set.
  double ContaminationRate() const;
};

// Deterministic in (params, split). Train and test draw from a substream
// keyed by the split name, so they are independent but share (mu, sigma).
// When params.epsilon > 0 the rows are then contaminated from the substream
// (seed, split, "contam").
Dataset GenerateDataset(const GenParams& params, Split split);

// Replace each row independently with probability epsilon by a draw from
// N(0, tau^2 I_d). Labels are kept. One uniform is consumed per row
// regardless of the outcome, so for a fixed seed changing epsilon only
// alters which rows get replaced.
Dataset Contaminate(const Dataset& data, double epsilon, double tau,
                    std::uint64_t seed);

// CSV with header `y,x0,...,x{d-1},contam` and %.9g floats.
void WriteDatasetCsv(const Dataset& data, std::ostream& out);
void WriteDatasetCsv(const Dataset& data, const std::string& path);
// Reads the format produced by WriteDatasetCsv. params is left default except
// for d (and n_train = rows).
Dataset ReadDatasetCsv(std::istream& in);
Dataset ReadDatasetCsv(const std::string& path);

}  // namespace mialab

#endif  // MIALAB_DATAGEN_HPP_
