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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {

namespace {

constexpr int kMaxDim = 4096;

std::string FormatG9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void GenParams::Validate() const {
  std::ostringstream err;
  if (d < 1 || d > kMaxDim) err << "d must be in [1, " << kMaxDim << "]; ";
  if (n_train < 2) err << "n_train must be >= 2; ";
  if (n_test < 2) err << "n_test must be >= 2; ";
  if (!(mu >= 0.0) || !std::isfinite(mu)) err << "mu must be >= 0; ";
  if (!(sigma > 0.0) || !std::isfinite(sigma)) err << "sigma must be > 0; ";
  if (!(sigma_noise > 0.0) || !std::isfinite(sigma_noise)) {
    err << "sigma_noise must be > 0; ";
  }
  if (!(w > 0.0 && w < 1.0)) err << "w must be in (0, 1); ";
  if (!(epsilon >= 0.0 && epsilon < 1.0)) err << "epsilon must be in [0, 1); ";
  if (!(tau_mult > 0.0) || !std::isfinite(tau_mult)) {
    err << "tau_mult must be > 0; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw ValidationError("invalid GenParams: " + msg);
}

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

double Dataset::ContaminationRate() const {
  if (contaminated_mask.empty()) return 0.0;
  std::size_t hits = 0;
  for (bool b : contaminated_mask) hits += b ? 1 : 0;
  return static_cast<double>(hits) / contaminated_mask.size();
}

Dataset GenerateDataset(const GenParams& params, Split split) {
  params.Validate();
  const int n = split == Split::kTrain ? params.n_train : params.n_test;
  const int d = params.d;

  Rng rng(DeriveSeed(params.seed, SplitName(split)));
  Dataset data;
  data.params = params;
  data.features.resize(n, d);
  data.labels.resize(n);
  data.contaminated_mask.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const int y = rng.Uniform() < params.w ? 1 : -1;
    data.labels[i] = y;
    data.features(i, 0) = rng.Normal(y * params.mu, params.sigma);
    for (int j = 1; j < d; ++j) {
      data.features(i, j) = rng.Normal(0.0, params.sigma_noise);
    }
  }
  if (params.epsilon > 0.0) {
    const std::string tag = std::string(SplitName(split)) + "/contam";
    return Contaminate(data, params.epsilon, params.Tau(),
                       DeriveSeed(params.seed, tag));
  }
  return data;
}

Dataset Contaminate(const Dataset& data, double epsilon, double tau,
                    std::uint64_t seed) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("contamination epsilon must be in [0, 1]");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw ValidationError("contamination tau must be > 0");
  }
  Dataset out = data;
  if (out.contaminated_mask.size() != data.labels.size()) {
    out.contaminated_mask.assign(data.labels.size(), false);
  }
  // Separate streams for the replace decision and the replacement draws, so
  // the decision sequence does not depend on how many rows were replaced.
  Rng decide(DeriveSeed(seed, "decide"));
  Rng draw(DeriveSeed(seed, "draw"));
  const int d = out.cols();
  for (int i = 0; i < out.rows(); ++i) {
    if (decide.Uniform() < epsilon) {
      for (int j = 0; j < d; ++j) out.features(i, j) = draw.Normal(0.0, tau);
      out.contaminated_mask[i] = true;
    }
  }
  return out;
}

void WriteDatasetCsv(const Dataset& data, std::ostream& out) {
  out << "y";
  for (int j = 0; j < data.cols(); ++j) out << ",x" << j;
  out << ",contam\n";
  for (int i = 0; i < data.rows(); ++i) {
    out << data.labels[i];
    for (int j = 0; j < data.cols(); ++j) out << ',' << FormatG9(data.features(i, j));
    const bool c = i < static_cast<int>(data.contaminated_mask.size()) &&
                   data.contaminated_mask[i];
    out << ',' << (c ? 1 : 0) << '\n';
  }
}

void WriteDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  WriteDatasetCsv(data, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Dataset ReadDatasetCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("dataset CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header.front() != "y" || header.back() != "contam") {
    throw ValidationError("dataset CSV header must be y,x0,...,contam");
  }
  const int d = static_cast<int>(header.size()) - 2;
  for (int j = 0; j < d; ++j) {
    if (header[j + 1] != "x" + std::to_string(j)) {
      throw ValidationError("unexpected dataset column: " + header[j + 1]);
    }
  }
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<bool> mask;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != d + 2) {
      throw ValidationError("dataset CSV line " + std::to_string(line_no) +
                            ": expected " + std::to_string(d + 2) + " fields");
    }
    try {
      const int y = std::stoi(cells[0]);
      if (y != 1 && y != -1) throw ValidationError("label must be -1 or +1");
      labels.push_back(y);
      std::vector<double> row(d);
      for (int j = 0; j < d; ++j) row[j] = std::stod(cells[j + 1]);
      rows.push_back(std::move(row));
      mask.push_back(std::stoi(cells[d + 1]) != 0);
    } catch (const std::logic_error&) {
      throw ValidationError("dataset CSV line " + std::to_string(line_no) +
                            ": malformed value");
    }
  }
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
  }
  data.labels = std::move(labels);
  data.contaminated_mask = std::move(mask);
  data.params.d = d;
  data.params.n_train = static_cast<int>(rows.size());
  return data;
}

Dataset ReadDatasetCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return ReadDatasetCsv(in);
}

}  // namespace mialab
