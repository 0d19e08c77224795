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

#ifndef MIALAB_RNG_HPP_
#define MIALAB_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace mialab {

// Stream splitting. A substream seed is splitmix64(splitmix64(seed) ^
// fnv1a64(tag)); distinct tags give statistically independent streams.
std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view bytes);
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view tag);

// Reproducible generator: std::mt19937_64 (bit-exact across standard
// libraries) with hand-rolled uniform and Marsaglia polar normals, so that
// sampled values do not depend on the library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(SplitMix64(seed)) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1].
  double UniformOpenZero() { return 1.0 - Uniform(); }
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }
  double Exponential();
  // Uniform integer in [0, n).
  std::size_t Index(std::size_t n);
  // Dirichlet(1, ..., 1) sample of dimension k.
  std::vector<double> FlatDirichlet(std::size_t k);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = Index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mialab

#endif  // MIALAB_RNG_HPP_
