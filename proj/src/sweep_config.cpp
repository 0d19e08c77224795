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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "mialab/errors.hpp"
#include "mialab/harness.hpp"

namespace mialab {

namespace {

constexpr const char* kConfigHeader = "mialab-sweep-config v1";

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseDouble(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw ValidationError("config key '" + key + "': bad number '" + text + "'");
  }
  return v;
}

long long ParseInteger(const std::string& key, const std::string& text) {
  const double v = ParseDouble(key, text);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
    throw ValidationError("config key '" + key + "': expected an integer, got '" +
                          text + "'");
  }
  return static_cast<long long>(v);
}

// Comma list, or start:stop:step with an inclusive stop (rounded to the
// nearest step so 0.05:0.5:0.05 gives ten values).
std::vector<double> ParseList(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(Trim(p));
    if (parts.size() != 3) {
      throw ValidationError("config key '" + key + "': range must be start:stop:step");
    }
    const double start = ParseDouble(key, parts[0]);
    const double stop = ParseDouble(key, parts[1]);
    const double step = ParseDouble(key, parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw ValidationError("config key '" + key + "': empty or invalid range");
    }
    const long long count = std::llround(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) throw ValidationError("config key '" + key + "': range too long");
    for (long long i = 0; i < count; ++i) {
      // Round to 12 significant decimals to keep 0.1 + 0.2 style drift out.
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (item.empty()) throw ValidationError("config key '" + key + "': empty list item");
    out.push_back(ParseDouble(key, item));
  }
  if (out.empty()) throw ValidationError("config key '" + key + "': empty list");
  return out;
}

template <typename T>
std::vector<T> IntList(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (double v : ParseList(key, text)) {
    if (v != std::floor(v) || v < 0) {
      throw ValidationError("config key '" + key + "': expected nonnegative integers");
    }
    out.push_back(static_cast<T>(v));
  }
  return out;
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

template <typename T>
std::string JoinList(const std::vector<T>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      s += Num(values[i]);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

}  // namespace

SweepGrid ParseSweepConfig(std::istream& in) {
  SweepGrid grid;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"mu", [&](auto& k, auto& v) { grid.mu_values = ParseList(k, v); }},
      {"d", [&](auto& k, auto& v) { grid.d_values = IntList<int>(k, v); }},
      {"n_train", [&](auto& k, auto& v) { grid.n_train_values = IntList<int>(k, v); }},
      {"w", [&](auto& k, auto& v) { grid.w_values = ParseList(k, v); }},
      {"epsilon", [&](auto& k, auto& v) { grid.epsilon_values = ParseList(k, v); }},
      {"seeds", [&](auto& k, auto& v) { grid.seeds = IntList<std::uint64_t>(k, v); }},
      {"n_test",
       [&](auto& k, auto& v) { grid.n_test = static_cast<int>(ParseInteger(k, v)); }},
      {"sigma", [&](auto& k, auto& v) { grid.sigma = ParseDouble(k, v); }},
      {"sigma_noise", [&](auto& k, auto& v) { grid.sigma_noise = ParseDouble(k, v); }},
      {"tau_mult", [&](auto& k, auto& v) { grid.tau_mult = ParseDouble(k, v); }},
      {"logistic_l2", [&](auto& k, auto& v) { grid.logistic_l2 = ParseDouble(k, v); }},
  };

  std::string line;
  int line_no = 0;
  bool saw_header = false;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kConfigHeader) {
        throw ValidationError(std::string("config must start with '") + kConfigHeader +
                              "'");
      }
      saw_header = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ValidationError("config line " + std::to_string(line_no) + ": unknown key '" +
                            key + "'");
    }
    if (seen[key]++) {
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" +
                            key + "'");
    }
    it->second(key, value);
  }
  if (!saw_header) throw ValidationError("config is empty");
  grid.Validate();
  return grid;
}

SweepGrid ReadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  return ParseSweepConfig(in);
}

void WriteSweepConfig(const SweepGrid& grid, std::ostream& out) {
  out << kConfigHeader << '\n'
      << "mu = " << JoinList(grid.mu_values) << '\n'
      << "d = " << JoinList(grid.d_values) << '\n'
      << "n_train = " << JoinList(grid.n_train_values) << '\n'
      << "w = " << JoinList(grid.w_values) << '\n'
      << "epsilon = " << JoinList(grid.epsilon_values) << '\n'
      << "seeds = " << JoinList(grid.seeds) << '\n'
      << "n_test = " << grid.n_test << '\n'
      << "sigma = " << Num(grid.sigma) << '\n'
      << "sigma_noise = " << Num(grid.sigma_noise) << '\n'
      << "tau_mult = " << Num(grid.tau_mult) << '\n'
      << "logistic_l2 = " << Num(grid.logistic_l2) << '\n';
}

}  // namespace mialab
