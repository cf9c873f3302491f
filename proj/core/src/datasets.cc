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

#include "donas/datasets.h"

#include <cmath>
#include <numbers>

#include "donas/rng.h"

namespace donas {

Matrix RingCenters(int n_modes, double radius) {
  DONAS_REQUIRE(n_modes >= 1, "RingCenters: n_modes must be >= 1");
  Matrix c(n_modes, 2);
  for (int k = 0; k < n_modes; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n_modes;
    c(k, 0) = radius * std::cos(a);
    c(k, 1) = radius * std::sin(a);
  }
  // Snap rounding residue so axis-aligned centers are exact.
  for (int i = 0; i < c.size(); ++i)
    if (std::abs(c.data()[i]) < 1e-15 * std::max(1.0, std::abs(radius))) c.data()[i] = 0.0;
  return c;
}

Matrix GenRing(int n, int n_modes, double radius, double sigma_mode,
               uint64_t seed) {
  DONAS_REQUIRE(n >= 0, "GenRing: n must be >= 0");
  const Matrix centers = RingCenters(n_modes, radius);
  Rng rng(seed);
  Matrix x(n, 2);
  for (int i = 0; i < n; ++i) {
    const int k = rng.Index(n_modes);
    const double e0 = rng.Normal();
    const double e1 = rng.Normal();
    x(i, 0) = centers(k, 0) + sigma_mode * e0;
    x(i, 1) = centers(k, 1) + sigma_mode * e1;
  }
  return x;
}

LabeledData GenTwoMoons(int n, double noise, uint64_t seed) {
  DONAS_REQUIRE(n >= 0, "GenTwoMoons: n must be >= 0");
  Rng rng(seed);
  LabeledData d;
  d.x.resize(n, 2);
  d.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const double t = std::numbers::pi * rng.Uniform();
    double px = std::cos(t);
    double py = std::sin(t);
    if (label == 1) {
      px = 1.0 - px;
      py = 0.5 - py;
    }
    const double e0 = rng.Normal();
    const double e1 = rng.Normal();
    d.x(i, 0) = px + noise * e0;
    d.x(i, 1) = py + noise * e1;
    d.labels[i] = label;
  }
  return d;
}

Matrix AxisScaling::Apply(const Matrix& x) const {
  DONAS_REQUIRE(x.cols() == scale.size(), "AxisScaling: dimension mismatch");
  Matrix out = x;
  for (int c = 0; c < x.cols(); ++c)
    out.col(c) = (x.col(c).array() * scale[c] + shift[c]).matrix();
  return out;
}

AxisScaling FitMinMax(const Matrix& x, double lo, double hi) {
  DONAS_REQUIRE(x.rows() >= 1, "FitMinMax: empty data");
  DONAS_REQUIRE(hi > lo, "FitMinMax: hi must exceed lo");
  AxisScaling s;
  s.scale.resize(x.cols());
  s.shift.resize(x.cols());
  for (int c = 0; c < x.cols(); ++c) {
    const double mn = x.col(c).minCoeff();
    const double mx = x.col(c).maxCoeff();
    const double range = mx - mn;
    s.scale[c] = range > 0.0 ? (hi - lo) / range : 1.0;
    s.shift[c] = range > 0.0 ? lo - mn * s.scale[c] : 0.5 * (lo + hi) - mn;
  }
  return s;
}

LabeledData Slice(const LabeledData& data, int begin, int end) {
  DONAS_REQUIRE(0 <= begin && begin <= end && end <= data.size(),
                "Slice: range out of bounds");
  LabeledData out;
  out.x = data.x.middleRows(begin, end - begin);
  out.labels.assign(data.labels.begin() + begin, data.labels.begin() + end);
  return out;
}

LabeledData Gather(const LabeledData& data, const std::vector<int>& rows) {
  LabeledData out;
  out.x.resize(rows.size(), data.x.cols());
  out.labels.resize(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    DONAS_REQUIRE(rows[r] >= 0 && rows[r] < data.size(), "Gather: row out of range");
    out.x.row(r) = data.x.row(rows[r]);
    out.labels[r] = data.labels[rows[r]];
  }
  return out;
}

}  // namespace donas
