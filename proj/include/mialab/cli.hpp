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

#ifndef MIALAB_CLI_HPP_
#define MIALAB_CLI_HPP_

#include <iosfwd>

namespace mialab {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitPartialSweep = 3;

// Environment variable holding the default sweep worker count.
inline constexpr const char* kWorkersEnv = "MIALAB_WORKERS";

// Entry point for the `mialab` tool; returns the process exit code.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mialab

#endif  // MIALAB_CLI_HPP_
