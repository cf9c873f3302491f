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

#ifndef DONAS_DOUBLE_ORACLE_H_
#define DONAS_DOUBLE_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "donas/metagame.h"
#include "donas/rng.h"

namespace donas {

struct DoConfig {
  double epsilon_term = 5e-3;
  int support_limit = 10;
  int max_epochs = 20;
  uint64_t seed = 0;
  // Disables pruning entirely; used by the soundness harness.
  bool prune = true;

  // Throws InputError if epsilon_term <= 0, support_limit < 2 or
  // max_epochs < 0.
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double game_value = 0.0;
  double row_gain = 0.0;
  double col_gain = 0.0;
  int row_pool = 0;
  int col_pool = 0;
  int pruned_rows = 0;
  int pruned_cols = 0;
  bool terminated = false;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct Gains {
  double row_gain = 0.0;
  double col_gain = 0.0;
};

// Improvement of the newest row (last row of U) and newest column (last
// column) over the equilibrium value of the earlier restricted game:
//   row_gain = U(last_row, col) - U(row, col)
//   col_gain = U(row, col) - U(row, last_col)
// Both are oriented so that positive means the new strategy helps its owner.
Gains ComputeGains(const PayoffMatrix& payoff, const MixedStrategy& row,
                   const MixedStrategy& col);

// True iff both gains are strictly below epsilon.
bool TerminationCheck(const PayoffMatrix& payoff, const MixedStrategy& row,
                      const MixedStrategy& col, double epsilon);

// Indices (in original numbering) that pruning removes, in removal order.
struct PrunePlan {
  std::vector<int> rows;
  std::vector<int> cols;
};

// While a pool exceeds `limit`, drop its minimum-probability strategy, lowest
// index first among ties, one at a time.
PrunePlan PlanPrune(const MixedStrategy& row, const MixedStrategy& col,
                    int limit);

// Removes the indices in `removed` from `pool` (order-preserving).
template <typename T>
void EraseIndices(std::vector<T>& pool, std::vector<int> removed) {
  std::sort(removed.rbegin(), removed.rend());
  for (int idx : removed) pool.erase(pool.begin() + idx);
}

PayoffMatrix EraseFromPayoff(const PayoffMatrix& payoff,
                             const PrunePlan& plan);

template <typename RowStrategy, typename ColStrategy>
struct PruneOutcome {
  std::vector<RowStrategy> row_pool;
  std::vector<ColStrategy> col_pool;
  PayoffMatrix payoff;
  PrunePlan removed;
};

template <typename RowStrategy, typename ColStrategy>
PruneOutcome<RowStrategy, ColStrategy> Prune(
    std::vector<RowStrategy> row_pool, std::vector<ColStrategy> col_pool,
    const PayoffMatrix& payoff, const MixedStrategy& row,
    const MixedStrategy& col, int limit) {
  DONAS_REQUIRE(limit >= 1, "Prune: support limit must be >= 1");
  DONAS_REQUIRE(static_cast<int>(row_pool.size()) == row.size() &&
                    row.size() == payoff.rows(),
                "Prune: row pool, row strategy and matrix disagree");
  DONAS_REQUIRE(static_cast<int>(col_pool.size()) == col.size() &&
                    col.size() == payoff.cols(),
                "Prune: column pool, column strategy and matrix disagree");
  PruneOutcome<RowStrategy, ColStrategy> out;
  out.removed = PlanPrune(row, col, limit);
  EraseIndices(row_pool, out.removed.rows);
  EraseIndices(col_pool, out.removed.cols);
  out.row_pool = std::move(row_pool);
  out.col_pool = std::move(col_pool);
  out.payoff = EraseFromPayoff(payoff, out.removed);
  return out;
}

// Everything the outer loop carries between epochs. Checkpoints persist this.
template <typename RowStrategy, typename ColStrategy>
struct DoState {
  std::vector<RowStrategy> row_pool;
  std::vector<ColStrategy> col_pool;
  PayoffMatrix payoff;
  MixedStrategy row_strategy;
  MixedStrategy col_strategy;
  int epoch = 0;
  bool terminated = false;
  std::vector<EpochRecord> trace;
};

// Passed to every oracle call; `seed` is derived from the run seed, the
// epoch and the player so oracle randomness does not depend on history.
struct OracleContext {
  int epoch = 0;
  uint64_t seed = 0;
};

// Double-oracle outer loop over a two-player zero-sum game whose pure
// strategies are arbitrary values (networks, perturbations, indices).
template <typename RowStrategy, typename ColStrategy>
class DoubleOracle {
 public:
  using State = DoState<RowStrategy, ColStrategy>;
  using RowOracle = std::function<RowStrategy(
      const std::vector<ColStrategy>&, const MixedStrategy&,
      const OracleContext&)>;
  using ColOracle = std::function<ColStrategy(
      const std::vector<RowStrategy>&, const MixedStrategy&,
      const OracleContext&)>;
  // Row player's utility for a pure pair; must be safe to call concurrently
  // on distinct pairs.
  using PayoffFn = std::function<double(const RowStrategy&, const ColStrategy&)>;
  // Runs after both oracles and before the meta-game is rebuilt. Returns true
  // if it modified strategies already in the pools, which forces every payoff
  // entry to be re-evaluated.
  using FinetuneHook = std::function<bool(
      std::vector<RowStrategy>&, std::vector<ColStrategy>&,
      const OracleContext&)>;
  using EpochCallback = std::function<void(const State&)>;

  DoubleOracle(RowOracle row_oracle, ColOracle col_oracle, PayoffFn payoff,
               DoConfig config)
      : row_oracle_(std::move(row_oracle)),
        col_oracle_(std::move(col_oracle)),
        payoff_(std::move(payoff)),
        config_(config) {
    config_.Validate();
  }

  void set_finetune_hook(FinetuneHook hook) { finetune_ = std::move(hook); }
  void set_epoch_callback(EpochCallback cb) { on_epoch_ = std::move(cb); }
  const DoConfig& config() const { return config_; }

  // One strategy per player, sigma = [1], U = [[payoff(row, col)]].
  State Initialize(RowStrategy first_row, ColStrategy first_col) const {
    State state;
    const double u = payoff_(first_row, first_col);
    if (!std::isfinite(u)) {
      throw NumericError("non-finite payoff for the initial strategy pair");
    }
    state.row_pool.push_back(std::move(first_row));
    state.col_pool.push_back(std::move(first_col));
    state.payoff = PayoffMatrix(Matrix::Constant(1, 1, u));
    state.row_strategy = MixedStrategy::Pure(1, 0);
    state.col_strategy = MixedStrategy::Pure(1, 0);
    return state;
  }

  // Executes one epoch. Returns true once the run has terminated.
  bool Step(State& state) const {
    if (state.terminated) return true;
    const int epoch = state.epoch + 1;
    const OracleContext row_ctx{epoch, DeriveSeed(config_.seed, "oracle-row", epoch)};
    const OracleContext col_ctx{epoch, DeriveSeed(config_.seed, "oracle-col", epoch)};

    // Both oracles respond to the previous equilibrium.
    RowStrategy new_row =
        row_oracle_(state.col_pool, state.col_strategy, row_ctx);
    ColStrategy new_col =
        col_oracle_(state.row_pool, state.row_strategy, col_ctx);
    state.row_pool.push_back(std::move(new_row));
    state.col_pool.push_back(std::move(new_col));

    bool refresh_all = false;
    if (finetune_) {
      const OracleContext ft_ctx{epoch, DeriveSeed(config_.seed, "finetune", epoch)};
      refresh_all = finetune_(state.row_pool, state.col_pool, ft_ctx);
    }
    state.payoff = refresh_all ? FullPayoff(state, epoch)
                               : AugmentedPayoff(state, epoch);

    // Gains of the new responses against the equilibrium they answered.
    const int n_rows = state.payoff.rows();
    const int n_cols = state.payoff.cols();
    const MixedStrategy prev_row = state.row_strategy.Padded(n_rows);
    const MixedStrategy prev_col = state.col_strategy.Padded(n_cols);
    const Gains gains = ComputeGains(state.payoff, prev_row, prev_col);
    const bool done = gains.row_gain < config_.epsilon_term &&
                      gains.col_gain < config_.epsilon_term;

    SolveResult solved = SolveZeroSum(state.payoff);
    state.row_strategy = solved.row_strategy;
    state.col_strategy = solved.col_strategy;

    EpochRecord record;
    record.epoch = epoch;
    record.game_value = solved.game_value;
    record.row_gain = gains.row_gain;
    record.col_gain = gains.col_gain;
    record.terminated = done;

    if (config_.prune) {
      auto pruned = Prune(std::move(state.row_pool), std::move(state.col_pool),
                          state.payoff, state.row_strategy, state.col_strategy,
                          config_.support_limit);
      state.row_pool = std::move(pruned.row_pool);
      state.col_pool = std::move(pruned.col_pool);
      state.payoff = std::move(pruned.payoff);
      record.pruned_rows = static_cast<int>(pruned.removed.rows.size());
      record.pruned_cols = static_cast<int>(pruned.removed.cols.size());
      if (record.pruned_rows > 0 || record.pruned_cols > 0) {
        solved = SolveZeroSum(state.payoff);
        state.row_strategy = solved.row_strategy;
        state.col_strategy = solved.col_strategy;
      }
    }
    record.row_pool = static_cast<int>(state.row_pool.size());
    record.col_pool = static_cast<int>(state.col_pool.size());

    state.epoch = epoch;
    state.terminated = done;
    state.trace.push_back(record);
    if (on_epoch_) on_epoch_(state);
    return done;
  }

  // Continues `state` until termination or max_epochs.
  void Resume(State& state) const {
    while (!state.terminated && state.epoch < config_.max_epochs) Step(state);
  }

  State Run(RowStrategy first_row, ColStrategy first_col) const {
    State state = Initialize(std::move(first_row), std::move(first_col));
    Resume(state);
    return state;
  }

 private:
  double Evaluate(const State& state, int i, int j, int epoch) const {
    const double u = payoff_(state.row_pool[i], state.col_pool[j]);
    if (!std::isfinite(u)) {
      std::ostringstream os;
      os << "non-finite payoff at epoch " << epoch << " for row strategy " << i
         << " vs column strategy " << j;
      throw NumericError(os.str());
    }
    return u;
  }

  PayoffMatrix AugmentedPayoff(const State& state, int epoch) const {
    const int m = state.payoff.rows();
    const int n = state.payoff.cols();
    Vector new_row(n);
    Vector new_col(m);
    for (int j = 0; j < n; ++j) new_row[j] = Evaluate(state, m, j, epoch);
    for (int i = 0; i < m; ++i) new_col[i] = Evaluate(state, i, n, epoch);
    return Augment(state.payoff, new_row, new_col, Evaluate(state, m, n, epoch));
  }

  PayoffMatrix FullPayoff(const State& state, int epoch) const {
    const int m = static_cast<int>(state.row_pool.size());
    const int n = static_cast<int>(state.col_pool.size());
    Matrix u(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) u(i, j) = Evaluate(state, i, j, epoch);
    return PayoffMatrix(std::move(u));
  }

  RowOracle row_oracle_;
  ColOracle col_oracle_;
  PayoffFn payoff_;
  FinetuneHook finetune_;
  EpochCallback on_epoch_;
  DoConfig config_;
};

}  // namespace donas

#endif  // DONAS_DOUBLE_ORACLE_H_
