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

#include "mialab/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "mialab/errors.hpp"

namespace mialab {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
                                    "#7f7f7f", "#bcbd22"};
constexpr const char* kDashes[] = {"", "6,3", "2,2"};

std::string Fmt(const char* fmt, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string P(double v) { return Fmt("%.2f", v); }

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

template <typename T>
bool Keep(const std::vector<T>& filter, const T& value) {
  return filter.empty() || std::find(filter.begin(), filter.end(), value) != filter.end();
}

struct Point {
  double mu, mean, sem;
};

struct Series {
  std::string label;
  std::vector<Point> acc, adv;
};

struct Frame {
  double x0, y0, w, h;  // pixel box
  double xmin, xmax, ymin, ymax;
  double X(double v) const { return x0 + (v - xmin) / (xmax - xmin) * w; }
  double Y(double v) const {
    v = std::clamp(v, ymin, ymax);
    return y0 + h - (v - ymin) / (ymax - ymin) * h;
  }
};

void Axes(std::ostringstream& s, const Frame& f, const std::string& ylabel,
          const std::vector<double>& xticks) {
  s << "<rect x=\"" << P(f.x0) << "\" y=\"" << P(f.y0) << "\" width=\"" << P(f.w)
    << "\" height=\"" << P(f.h) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const double ystep = (f.ymax - f.ymin) / 5.0;
  for (int i = 0; i <= 5; ++i) {
    const double v = f.ymin + i * ystep;
    s << "<line x1=\"" << P(f.x0) << "\" y1=\"" << P(f.Y(v)) << "\" x2=\""
      << P(f.x0 + f.w) << "\" y2=\"" << P(f.Y(v))
      << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    s << "<text x=\"" << P(f.x0 - 6) << "\" y=\"" << P(f.Y(v) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << Fmt("%.2f", v) << "</text>\n";
  }
  for (double t : xticks) {
    s << "<text x=\"" << P(f.X(t)) << "\" y=\"" << P(f.y0 + f.h + 16)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << Fmt("%.2f", t) << "</text>\n";
  }
  s << "<text x=\"" << P(f.x0 + f.w / 2) << "\" y=\"" << P(f.y0 + f.h + 34)
    << "\" text-anchor=\"middle\" font-size=\"12\">mu</text>\n";
  s << "<text transform=\"translate(" << P(f.x0 - 46) << "," << P(f.y0 + f.h / 2)
    << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << Escape(ylabel)
    << "</text>\n";
}

void DrawSeries(std::ostringstream& s, const Frame& f, const std::vector<Point>& pts,
                const char* color, const char* dash) {
  if (pts.empty()) return;
  // Band: upper edge left to right, lower edge back.
  s << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
  for (const Point& p : pts) s << P(f.X(p.mu)) << ',' << P(f.Y(p.mean + 1.96 * p.sem)) << ' ';
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    s << P(f.X(it->mu)) << ',' << P(f.Y(it->mean - 1.96 * it->sem)) << ' ';
  }
  s << "\"/>\n";
  s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
  if (*dash) s << " stroke-dasharray=\"" << dash << "\"";
  s << " points=\"";
  for (const Point& p : pts) s << P(f.X(p.mu)) << ',' << P(f.Y(p.mean)) << ' ';
  s << "\"/>\n";
  for (const Point& p : pts) {
    s << "<circle cx=\"" << P(f.X(p.mu)) << "\" cy=\"" << P(f.Y(p.mean))
      << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }
}

std::string RenderOne(int d, const std::vector<Series>& series,
                      const std::vector<double>& mus, const PlotOptions& o) {
  const double margin_l = 70, margin_t = 40, legend_w = 200, gap = 60;
  const double pw = o.width - margin_l - legend_w - 20;
  const double ph = o.panel_height;
  const double height = margin_t + 2 * ph + gap + 50;
  double xmin = mus.front(), xmax = mus.back();
  if (xmax - xmin < 1e-12) {
    xmin -= 0.05;
    xmax += 0.05;
  }
  const double pad = 0.03 * (xmax - xmin);
  Frame top{margin_l, margin_t, pw, ph, xmin - pad, xmax + pad, 0.4, 1.0};
  Frame bot{margin_l, margin_t + ph + gap, pw, ph, xmin - pad, xmax + pad, 0.45, 1.0};

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
    << P(height) << "\" viewBox=\"0 0 " << o.width << ' ' << P(height)
    << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << P(margin_l + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
    << "font-size=\"14\">d = " << d << "</text>\n";
  Axes(s, top, "test accuracy", mus);
  Axes(s, bot, "advantage (AUROC)", mus);
  s << "<line x1=\"" << P(bot.x0) << "\" y1=\"" << P(bot.Y(0.5)) << "\" x2=\""
    << P(bot.x0 + bot.w) << "\" y2=\"" << P(bot.Y(0.5))
    << "\" stroke=\"#000\" stroke-width=\"1\" stroke-dasharray=\"4,4\"/>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const char* dash = kDashes[(i / std::size(kPalette)) % std::size(kDashes)];
    DrawSeries(s, top, series[i].acc, color, dash);
    DrawSeries(s, bot, series[i].adv, color, dash);
    const double ly = margin_t + 8 + 16.0 * static_cast<double>(i);
    const double lx = margin_l + pw + 16;
    s << "<line x1=\"" << P(lx) << "\" y1=\"" << P(ly) << "\" x2=\"" << P(lx + 22)
      << "\" y2=\"" << P(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (*dash) s << " stroke-dasharray=\"" << dash << "\"";
    s << "/>\n<text x=\"" << P(lx + 28) << "\" y=\"" << P(ly + 4)
      << "\" font-size=\"10\">" << Escape(series[i].label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

std::map<int, std::string> RenderFigures(const std::vector<ResultRow>& rows,
                                         const PlotOptions& options) {
  std::vector<ResultRow> kept;
  for (const ResultRow& r : rows) {
    if (std::fabs(r.epsilon - options.epsilon) > 1e-9) continue;
    if (std::fabs(r.w - options.w) > 1e-9) continue;
    if (!Keep(options.models, r.model) || !Keep(options.score_kinds, r.score_kind) ||
        !Keep(options.n_train_values, r.n_train)) {
      continue;
    }
    kept.push_back(r);
  }
  const std::vector<SummaryRow> summary = Summarize(kept);

  std::map<int, std::map<std::tuple<std::string, std::string, int>, Series>> by_d;
  std::map<int, std::set<double>> mus;
  for (const SummaryRow& s : summary) {
    auto key = std::make_tuple(s.model, s.score_kind, s.n_train);
    Series& series = by_d[s.d][key];
    series.label = s.model + "/" + s.score_kind + " n=" + std::to_string(s.n_train);
    series.acc.push_back({s.mu, s.accuracy.mean, s.accuracy.sem});
    series.adv.push_back({s.mu, s.advantage.mean, s.advantage.sem});
    mus[s.d].insert(s.mu);
  }
  std::map<int, std::string> out;
  for (auto& [d, table] : by_d) {
    std::vector<Series> list;
    for (auto& [key, series] : table) {
      auto by_mu = [](const Point& a, const Point& b) { return a.mu < b.mu; };
      std::sort(series.acc.begin(), series.acc.end(), by_mu);
      std::sort(series.adv.begin(), series.adv.end(), by_mu);
      list.push_back(std::move(series));
    }
    const std::vector<double> mu_list(mus[d].begin(), mus[d].end());
    out[d] = RenderOne(d, list, mu_list, options);
  }
  return out;
}

std::vector<std::string> WriteFigures(const std::vector<ResultRow>& rows,
                                      const std::string& dir,
                                      const PlotOptions& options) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> paths;
  for (const auto& [d, svg] : RenderFigures(rows, options)) {
    const std::string path =
        (std::filesystem::path(dir) / ("figure_d" + std::to_string(d) + ".svg")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << svg;
    paths.push_back(path);
  }
  return paths;
}

}  // namespace mialab
