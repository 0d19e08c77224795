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

#include "mialab/datagen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mialab/errors.hpp"

namespace mialab {
namespace {

GenParams Base() {
  GenParams p;
  p.d = 16;
  p.n_train = 50;
  p.n_test = 100;
  p.mu = 0.3;
  p.seed = 1;
  return p;
}

TEST(DatagenTest, ShapesAndLabels) {
  GenParams p;
  p.d = 1;
  p.n_train = 4;
  p.mu = 0.0;
  p.sigma = 1.0;
  const Dataset data = GenerateDataset(p, Split::kTrain);
  ASSERT_EQ(data.rows(), 4);
  ASSERT_EQ(data.cols(), 1);
  for (int y : data.labels) EXPECT_TRUE(y == 1 || y == -1);
}

TEST(DatagenTest, BothClassesPossibleAtZeroShift) {
  GenParams p;
  p.d = 1;
  p.n_train = 4;
  p.mu = 0.0;
  p.sigma = 1.0;
  bool saw_pos = false, saw_neg = false;
  for (std::uint64_t s = 0; s < 20; ++s) {
    p.seed = s;
    for (int y : GenerateDataset(p, Split::kTrain).labels) {
      saw_pos |= y == 1;
      saw_neg |= y == -1;
    }
  }
  EXPECT_TRUE(saw_pos && saw_neg);
}

TEST(DatagenTest, CoreConditionalMeans) {
  const Dataset data = GenerateDataset(Base(), Split::kTrain);
  double sum_pos = 0, sum_neg = 0;
  int n_pos = 0, n_neg = 0;
  for (int i = 0; i < data.rows(); ++i) {
    if (data.labels[i] == 1) {
      sum_pos += data.features(i, 0);
      ++n_pos;
    } else {
      sum_neg += data.features(i, 0);
      ++n_neg;
    }
  }
  ASSERT_GT(n_pos, 0);
  ASSERT_GT(n_neg, 0);
  const double tol = 3 * 0.15 / std::sqrt(25.0);
  EXPECT_NEAR(sum_pos / n_pos, 0.3, tol * std::sqrt(25.0 / n_pos));
  EXPECT_NEAR(sum_neg / n_neg, -0.3, tol * std::sqrt(25.0 / n_neg));
}

TEST(DatagenTest, MarginalCoreMeanMonteCarlo) {
  GenParams p;
  p.d = 1;
  p.n_train = 1000000;
  p.mu = 0.2;
  p.seed = 77;
  const Dataset data = GenerateDataset(p, Split::kTrain);
  EXPECT_NEAR(data.features.col(0).mean(), 0.0, 0.003);
}

TEST(DatagenTest, ClassPrior) {
  GenParams p;
  p.d = 1;
  p.n_train = 100000;
  p.w = 0.3;
  const Dataset data = GenerateDataset(p, Split::kTrain);
  double pos = 0;
  for (int y : data.labels) pos += y == 1;
  EXPECT_NEAR(pos / 1e5, 0.3, 3 * std::sqrt(0.3 * 0.7 / 1e5));
}

TEST(DatagenTest, NoiseColumnsUnitVariance) {
  GenParams p = Base();
  p.n_train = 20000;
  const Dataset data = GenerateDataset(p, Split::kTrain);
  for (int j = 1; j < p.d; ++j) {
    const auto col = data.features.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().mean();
    EXPECT_NEAR(var, 1.0, 0.05);
  }
}

TEST(DatagenTest, DeterministicAndSplitIndependent) {
  const Dataset a = GenerateDataset(Base(), Split::kTrain);
  const Dataset b = GenerateDataset(Base(), Split::kTrain);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
  const Dataset t = GenerateDataset(Base(), Split::kTest);
  EXPECT_NE(a.features(0, 0), t.features(0, 0));
}

TEST(DatagenTest, ValidationRejectsBadParams) {
  GenParams p = Base();
  p.w = 1.0;
  EXPECT_THROW(GenerateDataset(p, Split::kTrain), ValidationError);
  p = Base();
  p.d = 0;
  EXPECT_THROW(GenerateDataset(p, Split::kTrain), ValidationError);
  p = Base();
  p.n_train = 1;
  EXPECT_THROW(GenerateDataset(p, Split::kTrain), ValidationError);
  p = Base();
  p.epsilon = 1.0;
  EXPECT_THROW(GenerateDataset(p, Split::kTrain), ValidationError);
  p = Base();
  p.sigma = 0.0;
  EXPECT_THROW(GenerateDataset(p, Split::kTrain), ValidationError);
}

TEST(DatagenTest, TauIsExactProduct) {
  GenParams p;
  p.tau_mult = 10.0;
  p.sigma_noise = 0.7;
  EXPECT_EQ(p.Tau(), 10.0 * 0.7);
}

TEST(ContaminateTest, ZeroEpsilonIsIdentity) {
  const Dataset data = GenerateDataset(Base(), Split::kTrain);
  const Dataset out = Contaminate(data, 0.0, 10.0, 3);
  EXPECT_EQ(out.features, data.features);
  for (bool m : out.contaminated_mask) EXPECT_FALSE(m);
}

TEST(ContaminateTest, FullReplacementVariance) {
  GenParams p = Base();
  p.d = 4;
  p.n_train = 20000;
  const Dataset out = Contaminate(GenerateDataset(p, Split::kTrain), 1.0, 10.0, 5);
  EXPECT_DOUBLE_EQ(out.ContaminationRate(), 1.0);
  for (int j = 0; j < 4; ++j) {
    const auto col = out.features.col(j);
    const double mean = col.mean();
    EXPECT_NEAR((col.array() - mean).square().mean(), 100.0, 4.0);
  }
}

TEST(ContaminateTest, RateAndLabelsKept) {
  GenParams p = Base();
  p.n_train = 50000;
  p.epsilon = 0.02;
  const Dataset clean = [&] {
    GenParams q = p;
    q.epsilon = 0.0;
    return GenerateDataset(q, Split::kTrain);
  }();
  const Dataset dirty = GenerateDataset(p, Split::kTrain);
  EXPECT_EQ(clean.labels, dirty.labels);
  EXPECT_NEAR(dirty.ContaminationRate(), 0.02, 3 * std::sqrt(0.02 * 0.98 / 5e4));
  // Rows that were not replaced are untouched.
  for (int i = 0; i < dirty.rows(); ++i) {
    if (!dirty.contaminated_mask[i]) {
      ASSERT_EQ(dirty.features.row(i), clean.features.row(i));
    }
  }
}

TEST(ContaminateTest, RejectsBadArguments) {
  const Dataset data = GenerateDataset(Base(), Split::kTrain);
  EXPECT_THROW(Contaminate(data, -0.1, 1.0, 0), ValidationError);
  EXPECT_THROW(Contaminate(data, 0.1, 0.0, 0), ValidationError);
}

TEST(DatasetCsvTest, RoundTrip) {
  GenParams p = Base();
  p.epsilon = 0.2;
  const Dataset data = GenerateDataset(p, Split::kTrain);
  std::stringstream ss;
  WriteDatasetCsv(data, ss);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header.substr(0, 8), "y,x0,x1,");
  EXPECT_EQ(header.substr(header.size() - 7), ",contam");
  const Dataset back = ReadDatasetCsv(ss);
  ASSERT_EQ(back.rows(), data.rows());
  EXPECT_EQ(back.labels, data.labels);
  EXPECT_EQ(back.contaminated_mask, data.contaminated_mask);
  EXPECT_TRUE(back.features.isApprox(data.features, 1e-8));
}

TEST(DatasetCsvTest, RejectsMalformed) {
  std::stringstream ss("y,x0,contam\n1,abc,0\n");
  EXPECT_THROW(ReadDatasetCsv(ss), ValidationError);
  std::stringstream bad_header("label,x0\n1,0.5\n");
  EXPECT_THROW(ReadDatasetCsv(bad_header), ValidationError);
}

}  // namespace
}  // namespace mialab
