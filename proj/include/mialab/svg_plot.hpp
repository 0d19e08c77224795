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

#ifndef MIALAB_SVG_PLOT_HPP_
#define MIALAB_SVG_PLOT_HPP_

#include <map>
#include <string>
#include <vector>

#include "mialab/harness.hpp"

namespace mialab {

// Optional filters; an empty list keeps everything on that axis.
struct PlotOptions {
  std::vector<std::string> models;
  std::vector<std::string> score_kinds;
  std::vector<int> n_train_values;
  double epsilon = 0.0;  // slice of the grid to draw
  double w = 0.5;
  int width = 760;
  int panel_height = 300;
};

// One SVG document per d: accuracy (top) and advantage (bottom) against mu,
// one series per (model, score, n_train), seed-mean with a shaded
// +/-1.96 SEM band and a 0.5 reference line in the advantage panel. Output is
// a pure function of the rows, byte for byte.
std::map<int, std::string> RenderFigures(const std::vector<ResultRow>& rows,
                                         const PlotOptions& options = {});

// Writes figure_d<d>.svg files into `dir` and returns their paths.
std::vector<std::string> WriteFigures(const std::vector<ResultRow>& rows,
                                      const std::string& dir,
                                      const PlotOptions& options = {});

}  // namespace mialab

#endif  // MIALAB_SVG_PLOT_HPP_
