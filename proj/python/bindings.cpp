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

// Python bindings for the mialab core.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "mialab/attacks.hpp"
#include "mialab/datagen.hpp"
#include "mialab/divergence.hpp"
#include "mialab/errors.hpp"
#include "mialab/harness.hpp"
#include "mialab/linear_models.hpp"
#include "mialab/metrics.hpp"

namespace py = pybind11;

namespace mialab {
namespace {

Dataset MakeDataset(const RowMatrix& x, const std::vector<int>& y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw ShapeError("features and labels disagree on row count");
  }
  Dataset data;
  data.features = x;
  data.labels = y;
  data.contaminated_mask.assign(y.size(), false);
  data.params.d = static_cast<int>(x.cols());
  data.params.n_train = static_cast<int>(y.size());
  return data;
}

ScoreKind ParseKind(const std::string& name) {
  const auto kind = ParseScoreKind(name);
  if (!kind) throw ValidationError("unknown score kind: " + name);
  return *kind;
}

py::dict RowDict(const ResultRow& r) {
  py::dict d;
  d["d"] = r.d;
  d["n_train"] = r.n_train;
  d["mu"] = r.mu;
  d["sigma"] = r.sigma;
  d["sigma_noise"] = r.sigma_noise;
  d["w"] = r.w;
  d["epsilon"] = r.epsilon;
  d["seed"] = r.seed;
  d["model"] = r.model;
  d["score_kind"] = r.score_kind;
  d["auroc"] = r.auroc;
  d["advantage"] = r.advantage;
  d["accuracy"] = r.accuracy;
  return d;
}

std::vector<ScoreKind> Kinds(const std::vector<std::string>& names) {
  if (names.empty()) return DefaultScoreKinds();
  std::vector<ScoreKind> kinds;
  for (const auto& n : names) kinds.push_back(ParseKind(n));
  return kinds;
}

}  // namespace
}  // namespace mialab

PYBIND11_MODULE(_mialab, m) {
  using namespace mialab;
  m.doc() = "Membership inference lab: toy data, target models, attacks and bounds.";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError",
                                                PyExc_ValueError);

  m.def(
      "generate",
      [](int d, int n, double mu, double sigma, double sigma_noise, double w,
         double epsilon, double tau_mult, std::uint64_t seed, const std::string& split) {
        GenParams p;
        p.d = d;
        p.n_train = n;
        p.n_test = n;
        p.mu = mu;
        p.sigma = sigma;
        p.sigma_noise = sigma_noise;
        p.w = w;
        p.epsilon = epsilon;
        p.tau_mult = tau_mult;
        p.seed = seed;
        if (split != "train" && split != "test") {
          throw ValidationError("split must be train or test");
        }
        const Dataset data = GenerateDataset(p, split == "train" ? Split::kTrain : Split::kTest);
        std::vector<bool> mask = data.contaminated_mask;
        return py::make_tuple(data.features, data.labels, mask);
      },
      py::arg("d"), py::arg("n") = 50, py::arg("mu") = 0.3, py::arg("sigma") = 0.15,
      py::arg("sigma_noise") = 1.0, py::arg("w") = 0.5, py::arg("epsilon") = 0.0,
      py::arg("tau_mult") = 10.0, py::arg("seed") = 0, py::arg("split") = "train",
      "Returns (features, labels in {-1, +1}, contaminated mask).");

  py::class_<LogisticModel>(m, "LogisticModel")
      .def_readonly("weights", &LogisticModel::weights)
      .def_readonly("bias", &LogisticModel::bias)
      .def_readonly("converged", &LogisticModel::converged)
      .def("posterior", [](const LogisticModel& model, const RowMatrix& x) {
        return Eigen::MatrixXd(PosteriorBatch(model, x));
      })
      .def("to_json", [](const LogisticModel& model) { return ToJson(model).dump(); });

  py::class_<LdaModel>(m, "LdaModel")
      .def_readonly("prior_pos", &LdaModel::prior_pos)
      .def_readonly("shrinkage_intensity", &LdaModel::shrinkage_intensity)
      .def("posterior", [](const LdaModel& model, const RowMatrix& x) {
        return Eigen::MatrixXd(PosteriorBatch(model, x));
      })
      .def("log_joint", [](const LdaModel& model, const RowMatrix& x) {
        return Eigen::MatrixXd(LogJointBatch(model, x));
      })
      .def("to_json", [](const LdaModel& model) { return ToJson(model).dump(); });

  m.def(
      "fit_logistic",
      [](const RowMatrix& x, const std::vector<int>& y, double l2) {
        LogisticOptions options;
        options.l2 = l2;
        return FitLogistic(MakeDataset(x, y), options);
      },
      py::arg("features"), py::arg("labels"), py::arg("l2") = 0.0);
  m.def(
      "fit_lda",
      [](const RowMatrix& x, const std::vector<int>& y) { return FitLda(MakeDataset(x, y)); },
      py::arg("features"), py::arg("labels"));

  m.def(
      "auroc",
      [](const std::vector<double>& members, const std::vector<double>& nonmembers,
         bool higher_is_member) {
        AttackScores s;
        s.member_scores = members;
        s.nonmember_scores = nonmembers;
        s.orientation =
            higher_is_member ? Orientation::kHigherIsMember : Orientation::kLowerIsMember;
        return Auroc(s);
      },
      py::arg("members"), py::arg("nonmembers"), py::arg("higher_is_member") = true);

  m.def(
      "attack",
      [](const py::object& model, const RowMatrix& mx, const std::vector<int>& my,
         const RowMatrix& nx, const std::vector<int>& ny, const std::string& score,
         std::uint64_t seed) {
        TargetModel target = py::isinstance<LdaModel>(model)
                                 ? TargetModel(model.cast<LdaModel>())
                                 : TargetModel(model.cast<LogisticModel>());
        const Dataset members = MakeDataset(mx, my);
        const Dataset nonmembers = MakeDataset(nx, ny);
        const ScoreKind kind = ParseKind(score);
        AttackScores s;
        if (IsGbmKind(kind)) {
          s = RunGbmAttack(target, members, nonmembers,
                           kind == ScoreKind::kGbmLogits ? AttackInterface::kLogits
                                                         : AttackInterface::kProbs,
                           seed);
        } else {
          s = ThresholdAttack(target, members, nonmembers, kind);
        }
        const AttackResult r = EvaluateAttack(s);
        py::dict out;
        out["member_scores"] = s.member_scores;
        out["nonmember_scores"] = s.nonmember_scores;
        out["auroc"] = r.auroc;
        out["advantage"] = r.advantage;
        return out;
      },
      py::arg("model"), py::arg("member_features"), py::arg("member_labels"),
      py::arg("nonmember_features"), py::arg("nonmember_labels"),
      py::arg("score") = "max_prob", py::arg("seed") = 0);

  m.def(
      "sweep",
      [](const std::string& config, const std::vector<std::string>& scores, int workers) {
        SweepGrid grid;
        if (!config.empty()) {
          std::istringstream in(config);
          grid = ParseSweepConfig(in);
        }
        SweepOptions options;
        options.scores = Kinds(scores);
        options.workers = workers;
        SweepTable table;
        {
          py::gil_scoped_release release;
          table = RunSweep(grid, options);
        }
        py::list rows;
        for (const ResultRow& r : table.rows) rows.append(RowDict(r));
        return rows;
      },
      py::arg("config") = "", py::arg("scores") = std::vector<std::string>{},
      py::arg("workers") = 1,
      "Runs a sweep from config text (empty for the built-in grid); returns row dicts.");

  m.def(
      "certify_bounds",
      [](int trials, int x_size, int y_size, std::uint64_t seed) {
        const CertificationSummary s = CertifyBounds(trials, x_size, y_size, seed);
        py::dict out;
        out["trials"] = s.rows.size();
        out["sandwich_violations"] = s.sandwich_violations;
        out["pinsker_violations"] = s.pinsker_violations;
        out["chain_violations"] = s.chain_violations;
        out["dominance_violations"] = s.dominance_violations;
        out["dominance_condition_count"] = s.dominance_condition_count;
        return out;
      },
      py::arg("trials") = 1000, py::arg("x_size") = 6, py::arg("y_size") = 4,
      py::arg("seed") = 0);
}
