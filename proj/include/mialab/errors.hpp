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

#ifndef MIALAB_ERRORS_HPP_
#define MIALAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace mialab {

// Bad parameters or malformed input (maps to CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Training data that cannot support a fit, e.g. a single class.
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bounded likelihood-ratio hypothesis fails (some ratio is 0 or infinite).
class UnboundedRatioError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mialab

#endif  // MIALAB_ERRORS_HPP_
