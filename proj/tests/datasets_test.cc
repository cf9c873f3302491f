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

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "donas/at_oracles.h"
#include "donas/diffnet.h"

namespace donas {
namespace {

TEST(GenRingTest, SingleModeWithoutNoise) {
  const Matrix x = GenRing(50, 1, 2.5, 0.0, 1);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(x(i, 0), 2.5);
    EXPECT_EQ(x(i, 1), 0.0);
  }
}

TEST(GenRingTest, FourModesAtRightAngles) {
  const Matrix x = GenRing(400, 4, 2.0, 0.0, 2);
  std::set<std::pair<double, double>> points;
  for (int i = 0; i < x.rows(); ++i) points.insert({x(i, 0), x(i, 1)});
  const std::set<std::pair<double, double>> expected = {
      {2.0, 0.0}, {0.0, 2.0}, {-2.0, 0.0}, {0.0, -2.0}};
  EXPECT_EQ(points, expected);
}

TEST(GenRingTest, ModeCountsUniformWithinThreeStandardErrors) {
  const int n = 8000, modes = 8;
  const Matrix x = GenRing(n, modes, 2.0, 0.05, 3);
  const Matrix c = RingCenters(modes, 2.0);
  std::vector<int> counts(modes, 0);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int k = 1; k < modes; ++k)
      if ((x.row(i) - c.row(k)).squaredNorm() < (x.row(i) - c.row(best)).squaredNorm()) best = k;
    ++counts[best];
  }
  const double p = 1.0 / modes;
  const double se = std::sqrt(n * p * (1 - p));
  for (int k = 0; k < modes; ++k) EXPECT_NEAR(counts[k], n * p, 3.0 * se) << "mode " << k;
}

TEST(GenRingTest, SeedDeterminesSamples) {
  EXPECT_EQ(GenRing(100, 8, 2.0, 0.05, 7), GenRing(100, 8, 2.0, 0.05, 7));
  EXPECT_NE(GenRing(100, 8, 2.0, 0.05, 7), GenRing(100, 8, 2.0, 0.05, 8));
}

TEST(GenTwoMoonsTest, NoiselessPointsLieOnHalfCircles) {
  const LabeledData d = GenTwoMoons(500, 0.0, 4);
  for (int i = 0; i < d.size(); ++i) {
    const double px = d.x(i, 0), py = d.x(i, 1);
    if (d.labels[i] == 0) {
      EXPECT_NEAR(px * px + py * py, 1.0, 1e-12);
      EXPECT_GE(py, 0.0);
    } else {
      EXPECT_NEAR((1 - px) * (1 - px) + (0.5 - py) * (0.5 - py), 1.0, 1e-12);
      EXPECT_LE(py, 0.5);
    }
  }
}

TEST(GenTwoMoonsTest, LabelsBalanced) {
  for (int n : {0, 1, 2, 999, 2000}) {
    const LabeledData d = GenTwoMoons(n, 0.1, 5);
    int ones = 0;
    for (int y : d.labels) ones += y;
    EXPECT_LE(std::abs((n - ones) - ones), 1) << n;
  }
}

TEST(GenTwoMoonsTest, NotLinearlySeparableButEasyForTwoLayers) {
  const LabeledData all = GenTwoMoons(2000, 0.1, 6);
  const LabeledData train = Slice(all, 0, 1000);
  const LabeledData test = Slice(all, 1000, 2000);
  Rng rng(7);
  const nn::Network linear =
      at::TrainStandard(nn::Network::Random(2, {{2, nn::Activation::kIdentity}}, rng), train,
                        3000, 64, 1e-2, 1);
  const nn::Network mlp = at::TrainStandard(
      nn::Network::Random(2, {{16, nn::Activation::kRelu}, {2, nn::Activation::kIdentity}}, rng),
      train, 3000, 64, 1e-2, 1);
  EXPECT_LT(at::Accuracy(linear, test), 0.95);
  EXPECT_GT(at::Accuracy(mlp, test), 0.95);
}

TEST(FitMinMaxTest, MapsExtremesToBounds) {
  Rng rng(8);
  const Matrix x = rng.NormalMatrix(100, 3) * 4.0;
  const AxisScaling s = FitMinMax(x);
  const Matrix y = s.Apply(x);
  for (int c = 0; c < 3; ++c) {
    EXPECT_NEAR(y.col(c).minCoeff(), -1.0, 1e-12);
    EXPECT_NEAR(y.col(c).maxCoeff(), 1.0, 1e-12);
  }
  EXPECT_THROW(s.Apply(Matrix::Zero(2, 2)), ContractError);
}

TEST(SliceGatherTest, SelectRows) {
  const LabeledData d = GenTwoMoons(10, 0.1, 9);
  const LabeledData s = Slice(d, 2, 5);
  ASSERT_EQ(s.size(), 3);
  EXPECT_EQ(s.x, d.x.middleRows(2, 3));
  const LabeledData g = Gather(d, {7, 1});
  ASSERT_EQ(g.size(), 2);
  EXPECT_EQ(g.x.row(0), d.x.row(7));
  EXPECT_EQ(g.labels[1], d.labels[1]);
}

}  // namespace
}  // namespace donas
