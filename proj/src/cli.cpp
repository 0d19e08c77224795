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

#include "mialab/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "mialab/attacks.hpp"
#include "mialab/datagen.hpp"
#include "mialab/divergence.hpp"
#include "mialab/errors.hpp"
#include "mialab/harness.hpp"
#include "mialab/linear_models.hpp"
#include "mialab/metrics.hpp"
#include "mialab/svg_plot.hpp"

namespace mialab {

namespace {

// Thrown by command bodies for bad flag combinations detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int DefaultWorkers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  return 1;
}

std::vector<ScoreKind> ParseScoreList(const std::vector<std::string>& names) {
  std::vector<ScoreKind> out;
  for (const std::string& name : names) {
    const auto kind = ParseScoreKind(name);
    if (!kind) throw UsageError("unknown score kind '" + name + "'");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  return out;
}

std::ofstream OpenOut(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  return out;
}

std::string Fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

TargetModel LoadTarget(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("model '" + path + "' is not valid JSON");
  }
  const std::string type = j.value("type", "");
  if (type == "logistic") return LogisticFromJson(j);
  if (type == "lda") return LdaFromJson(j);
  throw ValidationError("model '" + path + "' has unknown type '" + type + "'");
}

std::vector<ResultRow> LoadResults(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open results '" + path + "'");
  return ReadResultsCsv(in);
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"mialab: membership inference toy lab", "mialab"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // generate
  GenParams gen;
  std::string gen_split = "train";
  int gen_n = 50;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
  generate->add_option("--d", gen.d, "Feature dimension")->required();
  generate->add_option("--n", gen_n, "Number of rows")->capture_default_str();
  generate->add_option("--mu", gen.mu, "Core mean separation")->capture_default_str();
  generate->add_option("--sigma", gen.sigma, "Core noise sd")->capture_default_str();
  generate->add_option("--sigma-noise", gen.sigma_noise, "Nuisance noise sd")
      ->capture_default_str();
  generate->add_option("--w", gen.w, "Positive class prior P(y = +1)")->capture_default_str();
  generate->add_option("--epsilon", gen.epsilon, "Contamination rate")
      ->capture_default_str();
  generate->add_option("--tau-mult", gen.tau_mult, "Contamination scale multiplier")
      ->capture_default_str();
  generate->add_option("--split", gen_split, "Split label used for seeding")
      ->check(CLI::IsMember({"train", "test"}))
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "Base seed")->capture_default_str();
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  // train
  std::string train_data, train_model = "lda", train_out;
  double train_l2 = 0.0;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "Fit a target model on a dataset CSV");
  train->add_option("--data", train_data, "Training dataset CSV")->required();
  train->add_option("--model", train_model, "Model family")
      ->check(CLI::IsMember({"logistic", "lda"}))
      ->capture_default_str();
  train->add_option("--l2", train_l2, "Logistic L2 strength (0 = unregularized)")
      ->capture_default_str();
  train->add_option("--seed", train_seed, "Unused; fitting is deterministic")
      ->capture_default_str();
  train->add_option("--out", train_out, "Output model JSON path")->required();

  // attack
  std::string atk_target, atk_members, atk_nonmembers, atk_score = "max_prob", atk_out;
  std::uint64_t atk_seed = 0;
  auto* attack = app.add_subcommand("attack", "Score members against nonmembers");
  attack->add_option("--target", atk_target, "Target model JSON")->required();
  attack->add_option("--members", atk_members, "Member (training) dataset CSV")
      ->required();
  attack->add_option("--nonmembers", atk_nonmembers, "Nonmember dataset CSV")
      ->required();
  attack->add_option("--score", atk_score, "Score kind")->capture_default_str();
  attack->add_option("--seed", atk_seed, "Seed for the GBM attack split")
      ->capture_default_str();
  attack->add_option("--out", atk_out, "Output scores CSV path")->required();

  // sweep
  std::string sw_config, sw_out = "sweep_out";
  std::vector<std::string> sw_scores;
  bool sw_gbm = false;
  int sw_workers = DefaultWorkers();
  std::uint64_t sw_seed = 0;
  auto* sweep = app.add_subcommand("sweep", "Run the experiment grid");
  sweep->add_option("--config", sw_config, "Sweep config file (default: built-in grid)");
  sweep->add_option("--scores", sw_scores, "Score kinds (comma separated)")
      ->delimiter(',');
  sweep->add_flag("--gbm", sw_gbm, "Also run gbm_probs and gbm_logits attacks");
  sweep->add_option("--workers", sw_workers,
                    std::string("Worker threads (default from ") + kWorkersEnv + ")")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  sweep->add_option("--seed", sw_seed, "Offset added to every replicate seed")
      ->capture_default_str();
  sweep->add_option("--out", sw_out, "Output directory")->capture_default_str();

  // bounds
  int bd_trials = 1000, bd_x = 6, bd_y = 4;
  std::uint64_t bd_seed = 0;
  std::string bd_out = "bounds.csv";
  auto* bounds = app.add_subcommand("bounds", "Certify the divergence bounds");
  bounds->add_option("--trials", bd_trials, "Random instances")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bounds->add_option("--x", bd_x, "Marginal support size")->capture_default_str();
  bounds->add_option("--y", bd_y, "Label support size")->capture_default_str();
  bounds->add_option("--seed", bd_seed, "Base seed")->capture_default_str();
  bounds->add_option("--out", bd_out, "Output CSV path")->capture_default_str();

  // plot
  std::string pl_results, pl_out = "figures";
  PlotOptions pl_opts;
  std::uint64_t pl_seed = 0;
  auto* plot = app.add_subcommand("plot", "Emit one SVG figure per d");
  plot->add_option("--results", pl_results, "Results CSV")->required();
  plot->add_option("--models", pl_opts.models, "Models to draw")->delimiter(',');
  plot->add_option("--scores", pl_opts.score_kinds, "Score kinds to draw")
      ->delimiter(',');
  plot->add_option("--n-train", pl_opts.n_train_values, "Training sizes to draw")
      ->delimiter(',');
  plot->add_option("--epsilon", pl_opts.epsilon, "Contamination slice")
      ->capture_default_str();
  plot->add_option("--w", pl_opts.w, "Positive class prior slice")->capture_default_str();
  plot->add_option("--seed", pl_seed, "Unused; plots are deterministic")
      ->capture_default_str();
  plot->add_option("--out", pl_out, "Output directory")->capture_default_str();

  // report
  std::string rp_results, rp_out = "privacy_utility.csv";
  std::uint64_t rp_seed = 0;
  auto* report = app.add_subcommand("report", "Privacy-utility table from results");
  report->add_option("--results", rp_results, "Results CSV")->required();
  report->add_option("--seed", rp_seed, "Unused; reports are deterministic")
      ->capture_default_str();
  report->add_option("--out", rp_out, "Output CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*generate) {
      gen.n_train = gen_n;
      gen.n_test = gen_n;
      const Dataset data =
          GenerateDataset(gen, gen_split == "train" ? Split::kTrain : Split::kTest);
      auto f = OpenOut(gen_out);
      WriteDatasetCsv(data, f);
      out << "rows: " << data.features.rows() << ", columns: " << data.features.cols()
          << ", contaminated: " << Fixed(data.ContaminationRate()) << '\n';
    } else if (*train) {
      const Dataset data = ReadDatasetCsv(train_data);
      nlohmann::json j;
      double acc = 0.0;
      if (train_model == "logistic") {
        LogisticOptions opts;
        opts.l2 = train_l2;
        const LogisticModel m = FitLogistic(data, opts);
        acc = Accuracy(m, data);
        j = ToJson(m);
        out << "converged: " << (m.converged ? "yes" : "no")
            << ", iterations: " << m.iterations << '\n';
      } else {
        const LdaModel m = FitLda(data);
        acc = Accuracy(m, data);
        j = ToJson(m);
        out << "shrinkage: " << Fixed(m.shrinkage_intensity) << '\n';
      }
      auto f = OpenOut(train_out);
      f << j.dump(1) << '\n';
      out << "train accuracy: " << Fixed(acc) << '\n';
    } else if (*attack) {
      const auto kind = ParseScoreKind(atk_score);
      if (!kind) throw UsageError("unknown score kind '" + atk_score + "'");
      const TargetModel target = LoadTarget(atk_target);
      const Dataset members = ReadDatasetCsv(atk_members);
      const Dataset nonmembers = ReadDatasetCsv(atk_nonmembers);
      AttackScores scores;
      if (IsGbmKind(*kind)) {
        scores = RunGbmAttack(target, members, nonmembers,
                              *kind == ScoreKind::kGbmProbs ? AttackInterface::kProbs
                                                            : AttackInterface::kLogits,
                              atk_seed);
      } else {
        scores = ThresholdAttack(target, members, nonmembers, *kind);
      }
      const AttackResult r = EvaluateAttack(scores);
      auto f = OpenOut(atk_out);
      WriteAttackScoresCsv(scores, f);
      out << "score: " << ScoreKindName(*kind) << ", auroc: " << Fixed(r.auroc)
          << ", advantage: " << Fixed(r.advantage) << ", members: " << r.n_member
          << ", nonmembers: " << r.n_nonmember << '\n';
    } else if (*sweep) {
      SweepGrid grid = sw_config.empty() ? SweepGrid{} : ReadSweepConfig(sw_config);
      for (auto& s : grid.seeds) s += sw_seed;
      SweepOptions opts;
      if (!sw_scores.empty()) opts.scores = ParseScoreList(sw_scores);
      if (sw_gbm) {
        for (ScoreKind k : {ScoreKind::kGbmProbs, ScoreKind::kGbmLogits}) {
          if (std::find(opts.scores.begin(), opts.scores.end(), k) == opts.scores.end()) {
            opts.scores.push_back(k);
          }
        }
      }
      opts.workers = sw_workers;
      const SweepTable table = RunSweep(grid, opts);
      const std::filesystem::path dir(sw_out);
      {
        auto f = OpenOut((dir / "results.csv").string());
        WriteResultsCsv(table.rows, f);
      }
      {
        auto f = OpenOut((dir / "summary.csv").string());
        WriteSummaryCsv(Summarize(table.rows), f);
      }
      {
        auto f = OpenOut((dir / "privacy_utility.csv").string());
        WritePrivacyUtilityCsv(PrivacyUtilityReport(table.rows), f);
      }
      for (const CellResult& c : table.cells) {
        if (!c.ok) err << "failed: " << c.error << '\n';
      }
      out << "cells: " << table.cells.size() << ", rows: " << table.rows.size()
          << ", failed: " << table.failed_cells << '\n';
      return table.failed_cells == 0 ? kExitOk : kExitPartialSweep;
    } else if (*bounds) {
      if (bd_x < 2 || bd_y < 2) {
        throw ValidationError("--x and --y need at least 2 atoms");
      }
      const CertificationSummary s = CertifyBounds(bd_trials, bd_x, bd_y, bd_seed);
      auto f = OpenOut(bd_out);
      WriteCertificationCsv(s, f);
      out << "trials: " << s.rows.size() << ", sandwich: " << s.sandwich_violations
          << ", pinsker: " << s.pinsker_violations << ", chain: " << s.chain_violations
          << ", dominance: " << s.dominance_violations << " (condition held "
          << s.dominance_condition_count << ")\n"
          << "violations: " << s.total_violations() << '\n';
    } else if (*plot) {
      const std::vector<ResultRow> rows = LoadResults(pl_results);
      const auto paths = WriteFigures(rows, pl_out, pl_opts);
      for (const auto& p : paths) out << "wrote " << p << '\n';
      if (paths.empty()) out << "no rows matched; nothing written\n";
    } else if (*report) {
      const auto rows = PrivacyUtilityReport(LoadResults(rp_results));
      auto f = OpenOut(rp_out);
      WritePrivacyUtilityCsv(rows, f);
      out << "rows: " << rows.size() << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mialab
