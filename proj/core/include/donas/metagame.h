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

#ifndef DONAS_METAGAME_H_
#define DONAS_METAGAME_H_

#include <initializer_list>
#include <vector>

#include "donas/common.h"

namespace donas {

// Restricted zero-sum meta-game. Entry (i, j) is the row player's utility
// when row strategy i meets column strategy j; the column player receives the
// negation.
class PayoffMatrix {
 public:
  PayoffMatrix() = default;
  // Throws InputError on a non-finite entry or an empty matrix.
  explicit PayoffMatrix(Matrix entries);
  PayoffMatrix(std::initializer_list<std::initializer_list<double>> rows);

  int rows() const { return static_cast<int>(entries_.rows()); }
  int cols() const { return static_cast<int>(entries_.cols()); }
  bool empty() const { return entries_.size() == 0; }
  double operator()(int i, int j) const { return entries_(i, j); }
  const Matrix& entries() const { return entries_; }

  // The same game seen from the column player: -U^T.
  PayoffMatrix NegatedTranspose() const;
  PayoffMatrix WithoutRow(int i) const;
  PayoffMatrix WithoutCol(int j) const;

  friend bool operator==(const PayoffMatrix& a, const PayoffMatrix& b) {
    return a.entries_.rows() == b.entries_.rows() &&
           a.entries_.cols() == b.entries_.cols() &&
           a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
};

// Probability vector over a strategy pool.
class MixedStrategy {
 public:
  MixedStrategy() = default;
  // Throws InputError unless every entry is >= 0 and the sum is 1 within 1e-9.
  explicit MixedStrategy(Vector probs);
  MixedStrategy(std::initializer_list<double> probs);

  static MixedStrategy Pure(int size, int index);
  static MixedStrategy Uniform(int size);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  const Vector& probs() const { return probs_; }

  // Appends zero-probability entries up to `size`.
  MixedStrategy Padded(int size) const;

  friend bool operator==(const MixedStrategy& a, const MixedStrategy& b) {
    return a.probs_.size() == b.probs_.size() && a.probs_ == b.probs_;
  }

 private:
  Vector probs_;
};

struct SolveResult {
  MixedStrategy row_strategy;
  MixedStrategy col_strategy;
  double game_value = 0.0;
};

enum class Side { kRow, kCol };

struct BestResponseResult {
  int index = 0;
  double value = 0.0;
};

// sum_i sum_j row[i] * col[j] * U(i, j).
double ExpectedUtility(const PayoffMatrix& payoff, const MixedStrategy& row,
                       const MixedStrategy& col);

// Expected payoff of every pure row against `col` (or of every pure column
// against `row`).
Vector RowValues(const PayoffMatrix& payoff, const MixedStrategy& col);
Vector ColValues(const PayoffMatrix& payoff, const MixedStrategy& row);

// Exact maximin solution via the simplex method. The payoffs are shifted to
// be strictly positive, then
//
//   max 1^T y  s.t.  A y <= 1, y >= 0
//
// is solved for the column player; the optimal duals give the row player's
// strategy. Bland's rule prevents cycling on the degenerate games that
// duplicate strategies produce.
SolveResult SolveZeroSum(const PayoffMatrix& payoff);

// Pure best response inside the restricted game. The row player maximizes and
// the column player minimizes U; ties go to the lowest index.
BestResponseResult BestResponse(const PayoffMatrix& payoff,
                                const MixedStrategy& opponent, Side side);

// Grows U by one row and one column:
//   [ U        new_col ]
//   [ new_row  corner  ]
PayoffMatrix Augment(const PayoffMatrix& payoff, const Vector& new_row,
                     const Vector& new_col, double corner);

}  // namespace donas

#endif  // DONAS_METAGAME_H_
