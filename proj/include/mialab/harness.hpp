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

#ifndef MIALAB_HARNESS_HPP_
#define MIALAB_HARNESS_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mialab/attacks.hpp"
#include "mialab/datagen.hpp"
#include "mialab/linear_models.hpp"
#include "mialab/metrics.hpp"
#include "mialab/scores.hpp"

namespace mialab {

enum class ModelKind { kLogistic, kLda };

std::string_view ModelKindName(ModelKind kind);
// Whether `kind` can be computed from `model` (log-joint needs LDA).
bool ScoreApplies(ModelKind model, ScoreKind kind);

// The four threshold scores run by default (GBM attacks are opt-in).
std::vector<ScoreKind> DefaultScoreKinds();

struct CellOptions {
  LogisticOptions logistic;
  GbmAttackConfig gbm;
};

struct ModelAttack {
  ModelKind model = ModelKind::kLogistic;
  AttackResult result;
};

struct CellResult {
  GenParams params;               // params.seed is the derived cell seed
  std::uint64_t replicate_seed = 0;
  bool ok = true;
  std::string error;
  double accuracy_logistic = 0.0;
  double accuracy_lda = 0.0;
  bool logistic_converged = false;
  int logistic_iterations = 0;
  double lda_shrinkage = 0.0;
  double train_contamination = 0.0;
  double test_contamination = 0.0;
  std::vector<ModelAttack> attacks;
  double wall_time = 0.0;  // seconds; never written to deterministic outputs

  double AccuracyOf(ModelKind model) const {
    return model == ModelKind::kLogistic ? accuracy_logistic : accuracy_lda;
  }
  // nullptr when the pair was not requested or does not apply.
  const AttackResult* Find(ModelKind model, ScoreKind kind) const;
};

// Generates train/test (contaminating both when epsilon > 0), fits logistic
// regression and LDA, scores members (train) against nonmembers (test) for
// every requested kind that applies to each model. Errors from fitting are
// rethrown with the cell parameters attached.
CellResult RunCell(const GenParams& params, const std::vector<ScoreKind>& scores,
                   const CellOptions& options = {});

struct SweepGrid {
  std::vector<double> mu_values{0.05, 0.10, 0.15, 0.20, 0.25,
                                0.30, 0.35, 0.40, 0.45, 0.50};
  std::vector<int> d_values{16, 64, 256};
  std::vector<int> n_train_values{50, 200, 2000};
  std::vector<double> w_values{0.5};
  std::vector<double> epsilon_values{0.0};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int n_test = 4000;
  double sigma = 0.15;
  double sigma_noise = 1.0;
  double tau_mult = 10.0;
  double logistic_l2 = 1.0;  // scikit-learn default C = 1

  void Validate() const;
  // Cell parameter sets (seed field holds the replicate seed) in canonical
  // nested order: epsilon, w, d, n_train, mu, seed.
  std::vector<GenParams> Cells() const;
};

// Order-independent cell seed: a splitmix mix of the replicate seed with a
// stable hash of the cell's parameter tuple.
std::uint64_t CellSeed(const GenParams& cell, std::uint64_t replicate_seed);

// One metrics row per (cell, seed, model, score).
struct ResultRow {
  int d = 0;
  int n_train = 0;
  double mu = 0.0;
  double sigma = 0.0;
  double sigma_noise = 0.0;
  double w = 0.0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string model;
  std::string score_kind;
  double auroc = 0.0;
  double advantage = 0.0;
  double accuracy = 0.0;
};

struct SweepTable {
  std::vector<CellResult> cells;  // sorted by cell key
  std::vector<ResultRow> rows;    // sorted
  int failed_cells = 0;
};

struct SweepOptions {
  std::vector<ScoreKind> scores = DefaultScoreKinds();
  int workers = 1;
  CellOptions cell;
  // Optional cell ordering permutation for scheduling tests; empty = natural.
  std::vector<std::size_t> schedule;
};

// Runs every grid cell across a worker pool. Failed cells are recorded (rows
// with NaN metrics) and the sweep continues; output never depends on
// scheduling order.
SweepTable RunSweep(const SweepGrid& grid, const SweepOptions& options = {});

// Rows from a set of cell results, sorted.
std::vector<ResultRow> ToRows(const std::vector<CellResult>& cells,
                              const std::vector<ScoreKind>& scores);
void SortRows(std::vector<ResultRow>& rows);

// d,n_train,mu,sigma,sigma_noise,w,epsilon,seed,model,score_kind,auroc,
// advantage,accuracy with 6-decimal floats.
inline constexpr const char* kResultsHeader =
    "d,n_train,mu,sigma,sigma_noise,w,epsilon,seed,model,score_kind,auroc,"
    "advantage,accuracy";
void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> ReadResultsCsv(std::istream& in);

struct SummaryRow {
  int d = 0;
  int n_train = 0;
  double mu = 0.0;
  double sigma = 0.0;
  double sigma_noise = 0.0;
  double w = 0.0;
  double epsilon = 0.0;
  std::string model;
  std::string score_kind;
  int n_seeds = 0;
  MeanSem auroc;
  MeanSem advantage;
  MeanSem accuracy;
};

// Mean and SEM across seeds per (cell, model, score); NaN rows are skipped.
std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out);

struct PrivacyUtilityRow {
  int d = 0;
  int n_train = 0;
  double mu = 0.0;
  double w = 0.0;
  double epsilon = 0.0;
  std::string model;
  std::string score_kind;
  double utility = 0.0;           // seed-mean accuracy
  double attack_advantage = 0.0;  // seed-mean advantage
};

std::vector<PrivacyUtilityRow> PrivacyUtilityReport(const std::vector<ResultRow>& rows);
void WritePrivacyUtilityCsv(const std::vector<PrivacyUtilityRow>& rows, std::ostream& out);

// Flat key = value configuration; the first non-comment line must be the
// version header `mialab-sweep-config v1`. Lists are comma separated or
// `start:stop:step` (inclusive).
SweepGrid ParseSweepConfig(std::istream& in);
SweepGrid ReadSweepConfig(const std::string& path);
void WriteSweepConfig(const SweepGrid& grid, std::ostream& out);

}  // namespace mialab

#endif  // MIALAB_HARNESS_HPP_
