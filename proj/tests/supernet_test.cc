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

#include "donas/supernet.h"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

namespace donas::nas {
namespace {

using nn::Activation;
using nn::Layer;

CandidateOp Identity() { return CandidateOp{OpKind::kIdentity, {}}; }

CandidateOp Affine(Matrix w, Vector b, Activation a) {
  return CandidateOp{OpKind::kAffine, Layer{std::move(w), std::move(b), a}};
}

Cell NegationCell(int dim, Vector alpha) {
  return Cell{dim, dim,
              {Identity(), Affine(-Matrix::Identity(dim, dim), Vector::Zero(dim),
                                  Activation::kIdentity)},
              std::move(alpha)};
}

Supernet RandomSupernet(Rng& rng, bool with_head) {
  SupernetSpec spec;
  spec.input_dim = 1 + rng.Index(3);
  const int cells = 1 + rng.Index(3);
  for (int c = 0; c < cells; ++c) spec.cell_widths.push_back(1 + rng.Index(4));
  if (with_head) spec.head = nn::LayerSpec{2, Activation::kIdentity};
  Supernet net = Supernet::Random(spec, rng);
  net.SetArchParams(rng.NormalMatrix(net.arch_count(), 1).col(0));
  const Vector w = net.WeightParams();
  net.SetWeightParams(w + 0.1 * rng.NormalMatrix(static_cast<int>(w.size()), 1).col(0));
  return net;
}

TEST(MixedForwardTest, UniformIdentityAndNegationCancel) {
  const Supernet net({NegationCell(2, Vector::Zero(2))}, std::nullopt);
  Rng rng(1);
  EXPECT_LT(net.MixedForward(rng.NormalMatrix(4, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MixedForwardTest, SaturatedLogitsSelectIdentity) {
  Vector alpha(2);
  alpha << 20, -20;
  const Supernet net({NegationCell(2, alpha)}, std::nullopt);
  Rng rng(2);
  const Matrix x = rng.NormalMatrix(4, 2);
  EXPECT_LT((net.MixedForward(x) - x).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(MixedForwardTest, HandEvaluatedTwoCells) {
  // Cell 0 (1 -> 1): p = softmax(0, ln 3) = (0.25, 0.75) over
  // {tanh(2x), relu(x - 1)}. Cell 1: {identity, sigmoid(h)} at alpha (0, 0).
  Vector a0(2);
  a0 << 0.0, std::log(3.0);
  Cell c0{1, 1,
          {Affine(Matrix::Constant(1, 1, 2.0), Vector::Zero(1), Activation::kTanh),
           Affine(Matrix::Constant(1, 1, 1.0), Vector::Constant(1, -1.0), Activation::kRelu)},
          a0};
  Cell c1{1, 1,
          {Identity(), Affine(Matrix::Constant(1, 1, 1.0), Vector::Zero(1), Activation::kSigmoid)},
          Vector::Zero(2)};
  const Supernet net({c0, c1}, std::nullopt);
  const double x = 3.0;
  const double h = 0.25 * std::tanh(2 * x) + 0.75 * (x - 1);
  const double y = 0.5 * h + 0.5 / (1 + std::exp(-h));
  EXPECT_NEAR(net.MixedForward(Matrix::Constant(1, 1, x))(0, 0), y, 1e-15);
}

TEST(MixedForwardTest, ShiftInvariance) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Supernet net = RandomSupernet(rng, true);
    const Matrix x = rng.NormalMatrix(5, net.input_dim());
    const Matrix before = net.MixedForward(x);
    net.SetArchParams(net.ArchParams().array() + 3.7);
    EXPECT_LT((net.MixedForward(x) - before).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SupernetTest, RandomDropsIdentityWhenWidthsDiffer) {
  Rng rng(4);
  SupernetSpec spec;
  spec.input_dim = 2;
  spec.cell_widths = {3, 3};
  const Supernet net = Supernet::Random(spec, rng);
  EXPECT_EQ(net.cells()[0].ops.size(), 3u);
  EXPECT_EQ(net.cells()[1].ops.size(), 4u);
  EXPECT_EQ(net.cells()[1].ops[0].kind, OpKind::kIdentity);
}

TEST(SupernetTest, RejectsSingleCandidateCell) {
  Cell c{1, 1, {Identity()}, Vector::Zero(1)};
  EXPECT_THROW(Supernet({c}, std::nullopt), ContractError);
}

TEST(ArchGradTest, DeadPathHasZeroGradient) {
  // Cell 1 ignores its input (zero weights), so cell 0 cannot affect the loss.
  Rng rng(5);
  Vector a0(2);
  a0 << 0.3, -0.2;
  Cell c0{2, 2,
          {Affine(rng.NormalMatrix(2, 2), rng.NormalMatrix(2, 1).col(0), Activation::kTanh),
           Affine(rng.NormalMatrix(2, 2), rng.NormalMatrix(2, 1).col(0), Activation::kRelu)},
          a0};
  Cell c1{2, 1,
          {Affine(Matrix::Zero(1, 2), Vector::Constant(1, 0.4), Activation::kTanh),
           Affine(Matrix::Zero(1, 2), Vector::Constant(1, -0.1), Activation::kSigmoid)},
          Vector::Zero(2)};
  const Supernet net({c0, c1}, std::nullopt);
  nn::Loss loss{nn::LossKind::kLinearOutput, {}, {}, 1.0};
  const Vector g = ArchGrad(net, rng.NormalMatrix(6, 2), loss);
  EXPECT_EQ(g[0], 0.0);
  EXPECT_EQ(g[1], 0.0);
  EXPECT_NE(g[2], 0.0);
}

TEST(ArchGradTest, SumsToZeroWithinEachCell) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Supernet net = RandomSupernet(rng, true);
    nn::Loss loss{nn::LossKind::kCrossEntropy, {0, 1, 1, 0}, {}, 1.0};
    const Vector g = ArchGrad(net, rng.NormalMatrix(4, net.input_dim()), loss);
    int offset = 0;
    for (const Cell& cell : net.cells()) {
      const int k = static_cast<int>(cell.ops.size());
      EXPECT_NEAR(g.segment(offset, k).sum(), 0.0, 1e-12);
      offset += k;
    }
  }
}

TEST(GradientTest, MatchesCentralDifferences) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Supernet net = RandomSupernet(rng, true);
    const Matrix x = rng.NormalMatrix(5, net.input_dim());
    nn::Loss loss{nn::LossKind::kCrossEntropy, {0, 1, 0, 1, 1}, {}, 1.0};
    auto f_arch = [&](const Vector& a) {
      Supernet copy = net;
      copy.SetArchParams(a);
      return nn::EvaluateLoss(loss, copy.MixedForward(x)).value;
    };
    auto f_weights = [&](const Vector& w) {
      Supernet copy = net;
      copy.SetWeightParams(w);
      return nn::EvaluateLoss(loss, copy.MixedForward(x)).value;
    };
    EXPECT_LT(testing::MaxRelativeError(ArchGrad(net, x, loss),
                                        testing::CentralDifference(f_arch, net.ArchParams(), 1e-5)),
              1e-4)
        << "trial " << trial;
    EXPECT_LT(testing::MaxRelativeError(
                  WeightGrad(net, x, loss),
                  testing::CentralDifference(f_weights, net.WeightParams(), 1e-5)),
              1e-4)
        << "trial " << trial;
  }
}

TEST(DiscretizeTest, ArgmaxAndTieBreak) {
  Vector a(2);
  a << 0.9, 0.1;
  EXPECT_EQ(Supernet({NegationCell(1, a)}, std::nullopt).ArgmaxChoice().ops,
            std::vector<int>{0});
  const Supernet tied({NegationCell(1, Vector::Zero(2)), NegationCell(1, Vector::Zero(2))},
                      std::nullopt);
  EXPECT_EQ(tied.ArgmaxChoice().ops, (std::vector<int>{0, 0}));
}

TEST(DiscretizeTest, SaturatedForwardMatchesMixed) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Supernet net = RandomSupernet(rng, true);
    Vector a = Vector::Constant(net.arch_count(), -20.0);
    int offset = 0;
    for (const Cell& cell : net.cells()) {
      a[offset + rng.Index(static_cast<int>(cell.ops.size()))] = 20.0;
      offset += static_cast<int>(cell.ops.size());
    }
    net.SetArchParams(a);
    const Matrix x = rng.NormalMatrix(6, net.input_dim());
    EXPECT_LT((net.Discretize().Forward(x) - net.MixedForward(x)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(DiscretizeTest, Idempotent) {
  Rng rng(9);
  const Supernet net = RandomSupernet(rng, true);
  EXPECT_EQ(net.Discretize(), net.Discretize());
}

TEST(ExtractTest, IdentityBecomesUnitLayer) {
  const Supernet net({NegationCell(3, Vector::Zero(2))}, std::nullopt);
  const nn::Network n = net.Extract(ArchChoice{{0}});
  ASSERT_EQ(n.num_layers(), 1);
  EXPECT_EQ(n.layers()[0].weight, Matrix::Identity(3, 3));
  EXPECT_TRUE(n.layers()[0].bias.isZero());
}

TEST(SampleTopKTest, TopOneIsArgmax) {
  Rng rng(10);
  const Supernet net = RandomSupernet(rng, false);
  const auto top = SampleTopK(net, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], net.ArgmaxChoice());
}

TEST(SampleTopKTest, UniformTiesKeepEnumerationOrder) {
  const Supernet net({NegationCell(1, Vector::Zero(2)), NegationCell(1, Vector::Zero(2))},
                     std::nullopt);
  const auto top = SampleTopK(net, 4);
  ASSERT_EQ(top.size(), 4u);
  EXPECT_EQ(top[0].ops, (std::vector<int>{0, 0}));
  EXPECT_EQ(top[1].ops, (std::vector<int>{0, 1}));
  EXPECT_EQ(top[2].ops, (std::vector<int>{1, 0}));
  EXPECT_EQ(top[3].ops, (std::vector<int>{1, 1}));
  EXPECT_EQ(SampleTopK(net, 10).size(), 4u);
}

TEST(SampleTopKTest, ProbabilitiesNonIncreasing) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Supernet net = RandomSupernet(rng, false);
    const auto top = SampleTopK(net, 6);
    for (size_t i = 1; i < top.size(); ++i) {
      EXPECT_GE(ChoiceProbability(net, top[i - 1]), ChoiceProbability(net, top[i]));
    }
  }
}

TEST(SelectByLossTest, PicksTheTrainedCandidate) {
  // "good" fits y = x exactly; "bad" has its weights zeroed.
  const nn::Network good({Layer{Matrix::Identity(1, 1), Vector::Zero(1), Activation::kIdentity}});
  const nn::Network bad({Layer{Matrix::Zero(1, 1), Vector::Zero(1), Activation::kIdentity}});
  Rng rng(12);
  const Matrix x = rng.NormalMatrix(16, 1);
  nn::Loss loss{nn::LossKind::kSquaredError, {}, x, 1.0};
  auto eval = [&](const nn::Network& n) { return nn::LossValue(n, x, loss); };
  EXPECT_EQ(SelectByLoss({bad, good}, eval), 1);
  EXPECT_EQ(SelectByLoss({good, bad, good}, eval), 0);
}

}  // namespace
}  // namespace donas::nas
