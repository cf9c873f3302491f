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

#include "donas/metagame.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace donas {
namespace {

constexpr double kPivotTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;

// Drops round-off negatives and renormalizes onto the simplex.
Vector CleanDistribution(Vector p) {
  if (!p.allFinite()) throw NumericError("simplex produced a non-finite distribution");
  for (int i = 0; i < p.size(); ++i) p[i] = std::max(p[i], 0.0);
  const double total = p.sum();
  if (total <= 0.0) throw NumericError("simplex returned an empty distribution");
  return p / total;
}

}  // namespace

PayoffMatrix::PayoffMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1) {
    throw InputError("payoff matrix must be at least 1x1");
  }
  for (int i = 0; i < entries_.rows(); ++i) {
    for (int j = 0; j < entries_.cols(); ++j) {
      if (!std::isfinite(entries_(i, j))) {
        std::ostringstream os;
        os << "payoff matrix entry (" << i << ", " << j << ") is not finite";
        throw InputError(os.str());
      }
    }
  }
}

PayoffMatrix::PayoffMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  const int n_rows = static_cast<int>(rows.size());
  const int n_cols = n_rows > 0 ? static_cast<int>(rows.begin()->size()) : 0;
  Matrix m(n_rows, n_cols);
  int i = 0;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n_cols) {
      throw ContractError("ragged payoff matrix literal");
    }
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  *this = PayoffMatrix(std::move(m));
}

PayoffMatrix PayoffMatrix::NegatedTranspose() const {
  return PayoffMatrix(Matrix(-entries_.transpose()));
}

PayoffMatrix PayoffMatrix::WithoutRow(int i) const {
  DONAS_REQUIRE(i >= 0 && i < rows() && rows() > 1, "WithoutRow: bad index");
  Matrix m(rows() - 1, cols());
  m.topRows(i) = entries_.topRows(i);
  m.bottomRows(rows() - 1 - i) = entries_.bottomRows(rows() - 1 - i);
  return PayoffMatrix(std::move(m));
}

PayoffMatrix PayoffMatrix::WithoutCol(int j) const {
  DONAS_REQUIRE(j >= 0 && j < cols() && cols() > 1, "WithoutCol: bad index");
  Matrix m(rows(), cols() - 1);
  m.leftCols(j) = entries_.leftCols(j);
  m.rightCols(cols() - 1 - j) = entries_.rightCols(cols() - 1 - j);
  return PayoffMatrix(std::move(m));
}

MixedStrategy::MixedStrategy(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() < 1) throw InputError("mixed strategy must be non-empty");
  for (int i = 0; i < probs_.size(); ++i) {
    if (!std::isfinite(probs_[i]) || probs_[i] < 0.0) {
      std::ostringstream os;
      os << "mixed strategy entry " << i << " = " << probs_[i]
         << " is not a probability";
      throw InputError(os.str());
    }
  }
  if (std::abs(probs_.sum() - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "mixed strategy sums to " << probs_.sum() << ", not 1";
    throw InputError(os.str());
  }
}

MixedStrategy::MixedStrategy(std::initializer_list<double> probs)
    : MixedStrategy([&] {
        Vector v(static_cast<int>(probs.size()));
        int i = 0;
        for (double p : probs) v[i++] = p;
        return v;
      }()) {}

MixedStrategy MixedStrategy::Pure(int size, int index) {
  DONAS_REQUIRE(size >= 1 && index >= 0 && index < size,
                "MixedStrategy::Pure: index out of range");
  Vector v = Vector::Zero(size);
  v[index] = 1.0;
  return MixedStrategy(std::move(v));
}

MixedStrategy MixedStrategy::Uniform(int size) {
  DONAS_REQUIRE(size >= 1, "MixedStrategy::Uniform: size must be >= 1");
  return MixedStrategy(Vector::Constant(size, 1.0 / size));
}

MixedStrategy MixedStrategy::Padded(int size) const {
  DONAS_REQUIRE(size >= this->size(), "MixedStrategy::Padded cannot shrink");
  Vector v = Vector::Zero(size);
  v.head(probs_.size()) = probs_;
  MixedStrategy out;
  out.probs_ = std::move(v);
  return out;
}

double ExpectedUtility(const PayoffMatrix& payoff, const MixedStrategy& row,
                       const MixedStrategy& col) {
  DONAS_REQUIRE(row.size() == payoff.rows() && col.size() == payoff.cols(),
                "ExpectedUtility: strategy dimensions do not match the matrix");
  double total = 0.0;
  for (int i = 0; i < payoff.rows(); ++i) {
    if (row[i] == 0.0) continue;
    double row_sum = 0.0;
    for (int j = 0; j < payoff.cols(); ++j) row_sum += col[j] * payoff(i, j);
    total += row[i] * row_sum;
  }
  return total;
}

Vector RowValues(const PayoffMatrix& payoff, const MixedStrategy& col) {
  DONAS_REQUIRE(col.size() == payoff.cols(),
                "RowValues: column strategy does not match the matrix");
  return payoff.entries() * col.probs();
}

Vector ColValues(const PayoffMatrix& payoff, const MixedStrategy& row) {
  DONAS_REQUIRE(row.size() == payoff.rows(),
                "ColValues: row strategy does not match the matrix");
  return payoff.entries().transpose() * row.probs();
}

SolveResult SolveZeroSum(const PayoffMatrix& payoff) {
  if (payoff.empty()) throw InputError("SolveZeroSum: empty payoff matrix");
  const int m = payoff.rows();
  const int n = payoff.cols();
  const double shift = 1.0 - payoff.entries().minCoeff();
  if (!std::isfinite(shift) || !std::isfinite(payoff.entries().maxCoeff() + shift)) {
    throw NumericError("SolveZeroSum: payoff range overflows");
  }

  // Tableau rows 0..m-1: [A | I | 1]; row m: reduced costs, last column the
  // objective value.
  const int width = n + m + 1;
  Matrix t = Matrix::Zero(m + 1, width);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t(i, j) = payoff(i, j) + shift;
    t(i, n + i) = 1.0;
    t(i, width - 1) = 1.0;
  }
  for (int j = 0; j < n; ++j) t(m, j) = -1.0;
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;

  const int max_iterations = 100 * (n + m) * (n + m) + 1000;
  for (int iter = 0;; ++iter) {
    if (iter > max_iterations) {
      throw NumericError("SolveZeroSum: simplex iteration limit exceeded");
    }
    int entering = -1;
    for (int j = 0; j < n + m; ++j) {
      if (t(m, j) < -kPivotTolerance) {
        entering = j;
        break;
      }
    }
    if (entering < 0) break;

    int leaving = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = t(i, entering);
      if (a <= kPivotTolerance) continue;
      const double ratio = t(i, width - 1) / a;
      const double slack = kPivotTolerance * std::max(1.0, std::abs(best_ratio));
      if (leaving < 0 || ratio < best_ratio - slack ||
          (ratio <= best_ratio + slack && basis[i] < basis[leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    // A > 0 keeps the problem bounded, so a pivot row always exists.
    if (leaving < 0) throw NumericError("SolveZeroSum: unbounded simplex step");

    t.row(leaving) /= t(leaving, entering);
    for (int i = 0; i <= m; ++i) {
      if (i == leaving) continue;
      const double factor = t(i, entering);
      if (factor != 0.0) t.row(i) -= factor * t.row(leaving);
    }
    basis[leaving] = entering;
  }

  Vector y = Vector::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) y[basis[i]] = t(i, width - 1);
  }
  Vector x(m);
  for (int i = 0; i < m; ++i) x[i] = t(m, n + i);

  SolveResult result;
  result.row_strategy = MixedStrategy(CleanDistribution(std::move(x)));
  result.col_strategy = MixedStrategy(CleanDistribution(std::move(y)));
  result.game_value =
      ExpectedUtility(payoff, result.row_strategy, result.col_strategy);
  return result;
}

BestResponseResult BestResponse(const PayoffMatrix& payoff,
                                const MixedStrategy& opponent, Side side) {
  const Vector values = side == Side::kRow ? RowValues(payoff, opponent)
                                           : ColValues(payoff, opponent);
  BestResponseResult best{0, values[0]};
  for (int k = 1; k < values.size(); ++k) {
    const bool better = side == Side::kRow ? values[k] > best.value
                                           : values[k] < best.value;
    if (better) best = {k, values[k]};
  }
  return best;
}

PayoffMatrix Augment(const PayoffMatrix& payoff, const Vector& new_row,
                     const Vector& new_col, double corner) {
  DONAS_REQUIRE(new_row.size() == payoff.cols(),
                "Augment: new_row length must equal the column count");
  DONAS_REQUIRE(new_col.size() == payoff.rows(),
                "Augment: new_col length must equal the row count");
  const int m = payoff.rows();
  const int n = payoff.cols();
  Matrix grown(m + 1, n + 1);
  grown.topLeftCorner(m, n) = payoff.entries();
  grown.block(0, n, m, 1) = new_col;
  grown.block(m, 0, 1, n) = new_row.transpose();
  grown(m, n) = corner;
  return PayoffMatrix(std::move(grown));
}

}  // namespace donas
