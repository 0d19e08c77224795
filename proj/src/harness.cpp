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

#include "mialab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "mialab/errors.hpp"
#include "mialab/rng.hpp"

namespace mialab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string F6(double v) {
  if (std::isnan(v)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid "-0.000000" so reruns stay byte-identical regardless of sign noise.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::vector<ModelKind> Models() { return {ModelKind::kLogistic, ModelKind::kLda}; }

auto RowKey(const ResultRow& r) {
  return std::make_tuple(r.epsilon, r.w, r.d, r.n_train, r.mu, r.sigma, r.sigma_noise,
                         r.seed, r.model, r.score_kind);
}

auto CellKey(const CellResult& c) {
  return std::make_tuple(c.params.epsilon, c.params.w, c.params.d, c.params.n_train,
                         c.params.mu, c.params.sigma, c.params.sigma_noise,
                         c.params.n_test, c.params.tau_mult, c.replicate_seed);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "lda";
}

bool ScoreApplies(ModelKind model, ScoreKind kind) {
  return !(kind == ScoreKind::kLdaLogJoint && model != ModelKind::kLda);
}

std::vector<ScoreKind> DefaultScoreKinds() {
  return {ScoreKind::kMaxProb, ScoreKind::kEntropy, ScoreKind::kLogLoss,
          ScoreKind::kLdaLogJoint};
}

const AttackResult* CellResult::Find(ModelKind model, ScoreKind kind) const {
  for (const auto& a : attacks) {
    if (a.model == model && a.result.kind == kind) return &a.result;
  }
  return nullptr;
}

CellResult RunCell(const GenParams& params, const std::vector<ScoreKind>& scores,
                   const CellOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CellResult cell;
  cell.params = params;
  cell.replicate_seed = params.seed;
  try {
    const Dataset train = GenerateDataset(params, Split::kTrain);
    const Dataset test = GenerateDataset(params, Split::kTest);
    cell.train_contamination = train.ContaminationRate();
    cell.test_contamination = test.ContaminationRate();

    LogisticModel lr = FitLogistic(train, options.logistic);
    LdaModel lda = FitLda(train);
    cell.logistic_converged = lr.converged;
    cell.logistic_iterations = lr.iterations;
    cell.lda_shrinkage = lda.shrinkage_intensity;
    cell.accuracy_logistic = Accuracy(lr, test);
    cell.accuracy_lda = Accuracy(lda, test);

    for (ModelKind mk : Models()) {
      const TargetModel target =
          mk == ModelKind::kLogistic ? TargetModel(lr) : TargetModel(lda);
      const TargetOutputs mem = ComputeOutputs(target, train.features);
      const TargetOutputs non = ComputeOutputs(target, test.features);
      for (ScoreKind kind : scores) {
        if (!ScoreApplies(mk, kind)) continue;
        AttackScores s;
        if (IsGbmKind(kind)) {
          const auto interface = kind == ScoreKind::kGbmProbs ? AttackInterface::kProbs
                                                              : AttackInterface::kLogits;
          const std::string tag =
              std::string("gbm/") + std::string(ModelKindName(mk)) + "/" +
              std::string(ScoreKindName(kind));
          s = RunGbmAttackDetailed(target, train, test, interface,
                                   DeriveSeed(params.seed, tag), options.gbm)
                  .scores;
        } else {
          s.kind = kind;
          s.orientation = ScoreOrientation(kind);
          s.member_scores = ThresholdScores(mem, train.labels, kind);
          s.nonmember_scores = ThresholdScores(non, test.labels, kind);
        }
        cell.attacks.push_back({mk, EvaluateAttack(s)});
      }
    }
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "cell (d=" << params.d << ", n_train=" << params.n_train
        << ", mu=" << params.mu << ", w=" << params.w << ", epsilon=" << params.epsilon
        << ", seed=" << params.seed << "): " << e.what();
    throw std::runtime_error(msg.str());
  }
  cell.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

void SweepGrid::Validate() const {
  if (mu_values.empty() || d_values.empty() || n_train_values.empty() ||
      w_values.empty() || epsilon_values.empty() || seeds.empty()) {
    throw ValidationError("every sweep axis needs at least one value");
  }
  if (!(logistic_l2 >= 0.0)) throw ValidationError("logistic_l2 must be >= 0");
  for (const GenParams& p : Cells()) p.Validate();
}

std::vector<GenParams> SweepGrid::Cells() const {
  std::vector<GenParams> cells;
  for (double eps : epsilon_values) {
    for (double w : w_values) {
      for (int d : d_values) {
        for (int n : n_train_values) {
          for (double mu : mu_values) {
            for (std::uint64_t seed : seeds) {
              GenParams p;
              p.d = d;
              p.n_train = n;
              p.n_test = n_test;
              p.mu = mu;
              p.sigma = sigma;
              p.sigma_noise = sigma_noise;
              p.w = w;
              p.epsilon = eps;
              p.tau_mult = tau_mult;
              p.seed = seed;
              cells.push_back(p);
            }
          }
        }
      }
    }
  }
  return cells;
}

std::uint64_t CellSeed(const GenParams& cell, std::uint64_t replicate_seed) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "d=%d;n_train=%d;n_test=%d;mu=%.9g;sigma=%.9g;sigma_noise=%.9g;w=%.9g;"
                "epsilon=%.9g;tau_mult=%.9g",
                cell.d, cell.n_train, cell.n_test, cell.mu, cell.sigma, cell.sigma_noise,
                cell.w, cell.epsilon, cell.tau_mult);
  return SplitMix64(SplitMix64(replicate_seed) ^ Fnv1a64(buf));
}

std::vector<ResultRow> ToRows(const std::vector<CellResult>& cells,
                              const std::vector<ScoreKind>& scores) {
  std::vector<ResultRow> rows;
  for (const CellResult& c : cells) {
    for (ModelKind mk : Models()) {
      for (ScoreKind kind : scores) {
        if (!ScoreApplies(mk, kind)) continue;
        ResultRow r;
        r.d = c.params.d;
        r.n_train = c.params.n_train;
        r.mu = c.params.mu;
        r.sigma = c.params.sigma;
        r.sigma_noise = c.params.sigma_noise;
        r.w = c.params.w;
        r.epsilon = c.params.epsilon;
        r.seed = c.replicate_seed;
        r.model = std::string(ModelKindName(mk));
        r.score_kind = std::string(ScoreKindName(kind));
        const AttackResult* a = c.ok ? c.Find(mk, kind) : nullptr;
        r.auroc = a ? a->auroc : kNaN;
        r.advantage = a ? a->advantage : kNaN;
        r.accuracy = c.ok ? c.AccuracyOf(mk) : kNaN;
        rows.push_back(std::move(r));
      }
    }
  }
  SortRows(rows);
  return rows;
}

void SortRows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return RowKey(a) < RowKey(b);
  });
}

SweepTable RunSweep(const SweepGrid& grid, const SweepOptions& options) {
  grid.Validate();
  if (options.workers < 1) throw ValidationError("workers must be >= 1");
  std::vector<GenParams> cells = grid.Cells();
  std::vector<std::size_t> order = options.schedule;
  if (order.empty()) {
    order.resize(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  } else if (order.size() != cells.size()) {
    throw ValidationError("schedule must be a permutation of the grid cells");
  }
  CellOptions cell_options = options.cell;
  cell_options.logistic.l2 = grid.logistic_l2;

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const std::size_t i = order[k];
      GenParams p = cells[i];
      const std::uint64_t replicate = p.seed;
      p.seed = CellSeed(p, replicate);
      try {
        results[i] = RunCell(p, options.scores, cell_options);
      } catch (const std::exception& e) {
        results[i] = CellResult{};
        results[i].params = p;
        results[i].ok = false;
        results[i].error = e.what();
      }
      results[i].replicate_seed = replicate;
    }
  };
  const int workers = std::min<int>(options.workers, std::max<std::size_t>(1, cells.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  SweepTable table;
  table.cells = std::move(results);
  std::stable_sort(table.cells.begin(), table.cells.end(),
                   [](const CellResult& a, const CellResult& b) {
                     return CellKey(a) < CellKey(b);
                   });
  for (const auto& c : table.cells) table.failed_cells += !c.ok;
  table.rows = ToRows(table.cells, options.scores);
  return table;
}

void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.d << ',' << r.n_train << ',' << F6(r.mu) << ',' << F6(r.sigma) << ','
        << F6(r.sigma_noise) << ',' << F6(r.w) << ',' << F6(r.epsilon) << ',' << r.seed
        << ',' << r.model << ',' << r.score_kind << ',' << F6(r.auroc) << ','
        << F6(r.advantage) << ',' << F6(r.accuracy) << '\n';
  }
}

std::vector<ResultRow> ReadResultsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("results CSV is empty");
  const std::vector<std::string> header = SplitCsv(line);
  const std::vector<std::string> expected = SplitCsv(kResultsHeader);
  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
  std::string missing;
  for (const auto& name : expected) {
    if (!column.count(name)) missing += (missing.empty() ? "" : ", ") + name;
  }
  if (!missing.empty()) {
    throw ValidationError("results CSV is missing columns: " + missing);
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> cells = SplitCsv(line);
    if (cells.size() != header.size()) {
      throw ValidationError("results CSV line " + std::to_string(line_no) +
                            " has the wrong field count");
    }
    auto get = [&](const char* name) -> const std::string& {
      return cells[column.at(name)];
    };
    try {
      ResultRow r;
      r.d = std::stoi(get("d"));
      r.n_train = std::stoi(get("n_train"));
      r.mu = std::stod(get("mu"));
      r.sigma = std::stod(get("sigma"));
      r.sigma_noise = std::stod(get("sigma_noise"));
      r.w = std::stod(get("w"));
      r.epsilon = std::stod(get("epsilon"));
      r.seed = std::stoull(get("seed"));
      r.model = get("model");
      r.score_kind = get("score_kind");
      r.auroc = std::stod(get("auroc"));
      r.advantage = std::stod(get("advantage"));
      r.accuracy = std::stod(get("accuracy"));
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ValidationError("results CSV line " + std::to_string(line_no) +
                            " has a malformed value");
    }
  }
  return rows;
}

std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<double, double, int, int, double, double, double, std::string,
                         std::string>;
  struct Acc {
    std::vector<double> auroc, advantage, accuracy;
  };
  std::map<Key, Acc> groups;
  for (const ResultRow& r : rows) {
    Key key{r.epsilon, r.w, r.d, r.n_train, r.mu, r.sigma, r.sigma_noise, r.model,
            r.score_kind};
    Acc& acc = groups[key];
    if (std::isnan(r.auroc) || std::isnan(r.accuracy)) continue;
    acc.auroc.push_back(r.auroc);
    acc.advantage.push_back(r.advantage);
    acc.accuracy.push_back(r.accuracy);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, acc] : groups) {
    if (acc.auroc.empty()) continue;
    SummaryRow s;
    std::tie(s.epsilon, s.w, s.d, s.n_train, s.mu, s.sigma, s.sigma_noise, s.model,
             s.score_kind) = key;
    s.n_seeds = static_cast<int>(acc.auroc.size());
    s.auroc = ComputeMeanSem(acc.auroc);
    s.advantage = ComputeMeanSem(acc.advantage);
    s.accuracy = ComputeMeanSem(acc.accuracy);
    out.push_back(std::move(s));
  }
  return out;
}

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "d,n_train,mu,sigma,sigma_noise,w,epsilon,model,score_kind,n_seeds,"
         "auroc_mean,auroc_sem,advantage_mean,advantage_sem,accuracy_mean,"
         "accuracy_sem\n";
  for (const SummaryRow& s : rows) {
    out << s.d << ',' << s.n_train << ',' << F6(s.mu) << ',' << F6(s.sigma) << ','
        << F6(s.sigma_noise) << ',' << F6(s.w) << ',' << F6(s.epsilon) << ',' << s.model
        << ',' << s.score_kind << ',' << s.n_seeds << ',' << F6(s.auroc.mean) << ','
        << F6(s.auroc.sem) << ',' << F6(s.advantage.mean) << ',' << F6(s.advantage.sem)
        << ',' << F6(s.accuracy.mean) << ',' << F6(s.accuracy.sem) << '\n';
  }
}

std::vector<PrivacyUtilityRow> PrivacyUtilityReport(const std::vector<ResultRow>& rows) {
  std::vector<PrivacyUtilityRow> out;
  for (const SummaryRow& s : Summarize(rows)) {
    PrivacyUtilityRow r;
    r.d = s.d;
    r.n_train = s.n_train;
    r.mu = s.mu;
    r.w = s.w;
    r.epsilon = s.epsilon;
    r.model = s.model;
    r.score_kind = s.score_kind;
    r.utility = s.accuracy.mean;
    r.attack_advantage = s.advantage.mean;
    out.push_back(std::move(r));
  }
  return out;
}

void WritePrivacyUtilityCsv(const std::vector<PrivacyUtilityRow>& rows,
                            std::ostream& out) {
  out << "d,n_train,mu,w,epsilon,model,score_kind,utility,attack_advantage\n";
  for (const PrivacyUtilityRow& r : rows) {
    out << r.d << ',' << r.n_train << ',' << F6(r.mu) << ',' << F6(r.w) << ','
        << F6(r.epsilon) << ',' << r.model << ',' << r.score_kind << ','
        << F6(r.utility) << ',' << F6(r.attack_advantage) << '\n';
  }
}

}  // namespace mialab
