// Copyright 2026 The DONAS Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DONAS_CLI_H_
#define DONAS_CLI_H_

#include <string>
#include <vector>

namespace donas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitNumeric = 3;

// run --config <path> [--seed N] [--out DIR] [--mode gan|at|matrix-demo]
//     [--resume] [--stop-after EPOCH]
// args[0] is the program name.
int RunCli(const std::vector<std::string>& args);

}  // namespace donas

#endif  // DONAS_CLI_H_
