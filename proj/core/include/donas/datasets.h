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

#ifndef DONAS_DATASETS_H_
#define DONAS_DATASETS_H_

#include <cstdint>
#include <vector>

#include "donas/common.h"

namespace donas {

struct LabeledData {
  Matrix x;  // one example per row
  std::vector<int> labels;

  int size() const { return static_cast<int>(x.rows()); }
};

// n_modes points equally spaced on a circle, starting at (radius, 0).
Matrix RingCenters(int n_modes, double radius);

// Each point: a uniformly chosen ring center plus N(0, sigma_mode^2 I).
Matrix GenRing(int n, int n_modes, double radius, double sigma_mode,
               uint64_t seed);

// Two interleaving half circles. Class 0: (cos t, sin t); class 1:
// (1 - cos t, 0.5 - sin t), t ~ U[0, pi]; plus N(0, noise^2 I). Classes
// alternate, so the counts differ by at most one.
LabeledData GenTwoMoons(int n, double noise, uint64_t seed);

// Per-axis affine map x -> x * scale + shift.
struct AxisScaling {
  Vector scale;
  Vector shift;

  Matrix Apply(const Matrix& x) const;
};

// Maps the per-axis range of x onto [lo, hi].
AxisScaling FitMinMax(const Matrix& x, double lo = -1.0, double hi = 1.0);

// Rows [begin, end) of data.
LabeledData Slice(const LabeledData& data, int begin, int end);
LabeledData Gather(const LabeledData& data, const std::vector<int>& rows);

}  // namespace donas

#endif  // DONAS_DATASETS_H_
