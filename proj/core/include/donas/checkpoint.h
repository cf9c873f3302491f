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

#ifndef DONAS_CHECKPOINT_H_
#define DONAS_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "donas/at_oracles.h"
#include "donas/diffnet.h"
#include "donas/double_oracle.h"
#include "donas/serialize.h"
#include "donas/supernet.h"

namespace donas {

inline constexpr std::string_view kCheckpointMagic = "DONAS-CHECKPOINT";
inline constexpr int kCheckpointSchema = 1;

using Pool = std::variant<std::vector<int>, std::vector<nn::Network>,
                          std::vector<at::Perturbation>>;

// Everything needed to continue a run after `epoch`.
struct RunState {
  std::string mode;
  uint64_t seed = 0;
  std::string config_text;
  int epoch = 0;
  bool terminated = false;
  PayoffMatrix payoff;
  MixedStrategy row_strategy;
  MixedStrategy col_strategy;
  std::vector<EpochRecord> trace;
  Pool row_pool;
  Pool col_pool;
  std::vector<nas::Supernet> supernets;
  std::vector<nn::OptimState> optimizers;

  friend bool operator==(const RunState&, const RunState&) = default;
};

std::string SerializeCheckpoint(const RunState& state);
// Throws io::FormatError on a bad magic, unsupported schema or truncation.
RunState ParseCheckpoint(std::string data);

// Writes through a temporary file and renames, so a crash never leaves a
// half-written checkpoint behind.
void SaveCheckpoint(const RunState& state, const std::string& path);
RunState LoadCheckpoint(const std::string& path);

template <typename R, typename C>
RunState ToRunState(const DoState<R, C>& s) {
  RunState r;
  r.epoch = s.epoch;
  r.terminated = s.terminated;
  r.payoff = s.payoff;
  r.row_strategy = s.row_strategy;
  r.col_strategy = s.col_strategy;
  r.trace = s.trace;
  r.row_pool = s.row_pool;
  r.col_pool = s.col_pool;
  return r;
}

template <typename R, typename C>
DoState<R, C> ToDoState(const RunState& r) {
  const auto* rows = std::get_if<std::vector<R>>(&r.row_pool);
  const auto* cols = std::get_if<std::vector<C>>(&r.col_pool);
  if (rows == nullptr || cols == nullptr) {
    throw io::FormatError("checkpoint pools do not match the run mode '" + r.mode + "'");
  }
  DoState<R, C> s;
  s.row_pool = *rows;
  s.col_pool = *cols;
  s.payoff = r.payoff;
  s.row_strategy = r.row_strategy;
  s.col_strategy = r.col_strategy;
  s.epoch = r.epoch;
  s.terminated = r.terminated;
  s.trace = r.trace;
  return s;
}

}  // namespace donas

#endif  // DONAS_CHECKPOINT_H_
