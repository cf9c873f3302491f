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

#include "donas/double_oracle.h"

#include <algorithm>

namespace donas {
namespace {

std::vector<int> PlanOneSide(const MixedStrategy& sigma, int limit) {
  std::vector<int> removed;
  std::vector<bool> alive(sigma.size(), true);
  int remaining = sigma.size();
  while (remaining > limit) {
    int victim = -1;
    for (int i = 0; i < sigma.size(); ++i) {
      if (!alive[i]) continue;
      if (victim < 0 || sigma[i] < sigma[victim]) victim = i;
    }
    alive[victim] = false;
    removed.push_back(victim);
    --remaining;
  }
  return removed;
}

}  // namespace

void DoConfig::Validate() const {
  if (!(epsilon_term > 0.0)) throw InputError("epsilon_term must be > 0");
  if (support_limit < 2) throw InputError("support_limit must be >= 2");
  if (max_epochs < 0) throw InputError("max_epochs must be >= 0");
}

Gains ComputeGains(const PayoffMatrix& payoff, const MixedStrategy& row,
                   const MixedStrategy& col) {
  const double value = ExpectedUtility(payoff, row, col);
  const MixedStrategy last_row = MixedStrategy::Pure(payoff.rows(), payoff.rows() - 1);
  const MixedStrategy last_col = MixedStrategy::Pure(payoff.cols(), payoff.cols() - 1);
  Gains g;
  g.row_gain = ExpectedUtility(payoff, last_row, col) - value;
  g.col_gain = value - ExpectedUtility(payoff, row, last_col);
  return g;
}

bool TerminationCheck(const PayoffMatrix& payoff, const MixedStrategy& row,
                      const MixedStrategy& col, double epsilon) {
  const Gains g = ComputeGains(payoff, row, col);
  return g.row_gain < epsilon && g.col_gain < epsilon;
}

PrunePlan PlanPrune(const MixedStrategy& row, const MixedStrategy& col,
                    int limit) {
  DONAS_REQUIRE(limit >= 1, "PlanPrune: support limit must be >= 1");
  return {PlanOneSide(row, limit), PlanOneSide(col, limit)};
}

PayoffMatrix EraseFromPayoff(const PayoffMatrix& payoff,
                             const PrunePlan& plan) {
  std::vector<int> keep_rows, keep_cols;
  for (int i = 0; i < payoff.rows(); ++i) {
    if (std::find(plan.rows.begin(), plan.rows.end(), i) == plan.rows.end())
      keep_rows.push_back(i);
  }
  for (int j = 0; j < payoff.cols(); ++j) {
    if (std::find(plan.cols.begin(), plan.cols.end(), j) == plan.cols.end())
      keep_cols.push_back(j);
  }
  Matrix out(keep_rows.size(), keep_cols.size());
  for (size_t a = 0; a < keep_rows.size(); ++a)
    for (size_t b = 0; b < keep_cols.size(); ++b)
      out(a, b) = payoff(keep_rows[a], keep_cols[b]);
  return PayoffMatrix(std::move(out));
}

}  // namespace donas
