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

#include "donas/at_oracles.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.h"

namespace donas::at {
namespace {

using nn::Activation;
using nn::Layer;
using nn::Network;

Network Linear(Matrix w, Vector b) {
  return Network({Layer{std::move(w), std::move(b), Activation::kIdentity}});
}

Network RandomClassifier(Rng& rng, int in = 2, int classes = 2) {
  return Network::Random(in, {{8, Activation::kTanh}, {classes, Activation::kIdentity}}, rng);
}

LabeledData RandomData(Rng& rng, int n, int dim = 2, int classes = 2) {
  LabeledData d{rng.UniformMatrix(n, dim, -1.0, 1.0), std::vector<int>(n)};
  for (int& y : d.labels) y = rng.Index(classes);
  return d;
}

double Softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// Binary linear classifier: the loss of example i is softplus of the margin
// m_i = (w_other - w_y) . x + (b_other - b_y), so the worst case over the
// box adds eps * ||w_other - w_y||_1.
Vector LinearWorstCaseLoss(const Network& net, const LabeledData& d, double eps) {
  const Layer& l = net.layers()[0];
  Vector out(d.size());
  for (int i = 0; i < d.size(); ++i) {
    const int y = d.labels[i];
    const Vector dw = (l.weight.row(1 - y) - l.weight.row(y)).transpose();
    const double m = dw.dot(d.x.row(i).transpose()) + l.bias[1 - y] - l.bias[y];
    out[i] = Softplus(m + eps * dw.lpNorm<1>());
  }
  return out;
}

Vector PerExampleCe(const Network& net, const Matrix& x, const std::vector<int>& labels) {
  return nn::PerExampleLoss(CrossEntropy(labels), net.Forward(x));
}

TEST(FgsmTest, SignOfGradientWithZeroLeftInPlace) {
  // Class 1 logit grows with x0 only; the gradient in x1 is exactly zero.
  const Network net = Linear((Matrix(2, 2) << 0, 0, 1, 0).finished(), Vector::Zero(2));
  const Matrix x = (Matrix(2, 2) << 0.2, 0.3, -0.4, 0.1).finished();
  const Matrix adv = Fgsm(net, x, {0, 1}, 0.1);
  EXPECT_NEAR(adv(0, 0), 0.3, 1e-15);   // label 0: push class-1 logit up
  EXPECT_NEAR(adv(1, 0), -0.5, 1e-15);  // label 1: push it down
  EXPECT_EQ(adv(0, 1), 0.3);
  EXPECT_EQ(adv(1, 1), 0.1);
}

TEST(FgsmTest, ZeroEpsilonIsIdentityAndNegativeThrows) {
  Rng rng(1);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 10);
  EXPECT_EQ(Fgsm(net, d.x, d.labels, 0.0), d.x);
  EXPECT_THROW(Fgsm(net, d.x, d.labels, -0.1), ContractError);
}

TEST(FgsmTest, DomainClipping) {
  Rng rng(2);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 50);
  const Matrix adv = Fgsm(net, d.x, d.labels, 0.5, DataDomain{-1.0, 1.0});
  EXPECT_LE(adv.maxCoeff(), 1.0);
  EXPECT_GE(adv.minCoeff(), -1.0);
}

TEST(LinearWorstCaseTest, FgsmAndPgdReachAnalyticMaximum) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + rng.Index(5);
    const Network net = Linear(rng.NormalMatrix(2, dim), rng.NormalMatrix(2, 1).col(0));
    const LabeledData d = RandomData(rng, 20, dim);
    const double eps = rng.Uniform(0.01, 0.5);
    const Vector worst = LinearWorstCaseLoss(net, d, eps);

    const Vector fgsm = PerExampleCe(net, Fgsm(net, d.x, d.labels, eps), d.labels);
    EXPECT_LT((fgsm - worst).cwiseAbs().maxCoeff(), 1e-6);
    for (bool random_start : {false, true}) {
      Rng attack_rng(trial);
      const Matrix adv = Pgd(net, d.x, d.labels, AttackConfig::Pgd(eps, 10, random_start),
                             attack_rng);
      EXPECT_LE((adv - d.x).cwiseAbs().maxCoeff(), eps * (1 + 1e-12));
      const Vector pgd = PerExampleCe(net, adv, d.labels);
      EXPECT_LT((pgd - worst).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(PgdTest, SingleFullStepEqualsFgsm) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = RandomClassifier(rng, 3, 3);
    const LabeledData d = RandomData(rng, 30, 3, 3);
    AttackConfig c = AttackConfig::Fgsm(0.1);
    Rng unused(0);
    EXPECT_EQ(Pgd(net, d.x, d.labels, c, unused), Fgsm(net, d.x, d.labels, 0.1));
  }
}

TEST(PgdTest, StaysInBoxAndDomain) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Network net = RandomClassifier(rng);
    const LabeledData d = RandomData(rng, 40);
    AttackConfig c = AttackConfig::Pgd(0.2, 25, true);
    c.step = 0.15;
    c.domain = DataDomain{-1.0, 1.0};
    const Matrix adv = Pgd(net, d.x, d.labels, c, rng);
    EXPECT_LE((adv - d.x).cwiseAbs().maxCoeff(), 0.2 + 1e-12);
    EXPECT_LE(adv.maxCoeff(), 1.0);
    EXPECT_GE(adv.minCoeff(), -1.0);
  }
}

TEST(PgdTest, MoreIterationsNeverLessLossOnLinearModel) {
  Rng rng(6);
  const Network net = Linear(rng.NormalMatrix(2, 2), Vector::Zero(2));
  const LabeledData d = RandomData(rng, 50);
  Rng r1(1), r2(1);
  const double l2 = nn::LossValue(net, Pgd(net, d.x, d.labels, AttackConfig::Pgd(0.1, 2, false), r1),
                                  CrossEntropy(d.labels));
  const double l10 = nn::LossValue(
      net, Pgd(net, d.x, d.labels, AttackConfig::Pgd(0.1, 10, false), r2), CrossEntropy(d.labels));
  EXPECT_GE(l10, l2);
}

TEST(AttackConfigTest, Validation) {
  AttackConfig c;
  c.epsilon = -1.0;
  EXPECT_THROW(c.Validate(), InputError);
  c = AttackConfig{};
  c.step = 0.0;
  EXPECT_THROW(c.Validate(), InputError);
  c = AttackConfig{};
  c.iterations = 0;
  EXPECT_THROW(c.Validate(), InputError);
  c = AttackConfig{};
  c.domain = DataDomain{1.0, 1.0};
  EXPECT_THROW(c.Validate(), InputError);
  EXPECT_NO_THROW(AttackConfig::Pgd(0.1, 20).Validate());
}

TEST(AttackerOracleTest, SingleHopIsFgsmStep) {
  Rng rng(7);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 32);
  AttackerOracleConfig c;
  c.epsilon = 0.1;
  c.hops = 1;
  c.batch = 32;
  const Perturbation p = AttackerOracle(c, {net}, MixedStrategy{1.0}, d, 3);
  const Matrix expected = Fgsm(net, d.x, d.labels, 0.1) - d.x;
  EXPECT_LT((p.delta - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AttackerOracleTest, BudgetHoldsAfterEveryHop) {
  Rng rng(8);
  std::vector<Network> nets = {RandomClassifier(rng), RandomClassifier(rng)};
  const LabeledData d = RandomData(rng, 100);
  AttackerOracleConfig c;
  c.epsilon = 0.1;
  c.hops = 4;
  c.epochs = 2;
  c.batch = 16;
  int calls = 0;
  const Perturbation p = AttackerOracle(c, nets, MixedStrategy{0.4, 0.6}, d, 5,
                                        [&](const Perturbation& q) {
                                          ++calls;
                                          EXPECT_LE(q.MaxAbs(), 0.1);
                                        });
  EXPECT_EQ(calls, 2 * 7 * 4);
  EXPECT_TRUE(p.WithinBudget());
  EXPECT_GT(p.MaxAbs(), 0.0);
}

TEST(AttackerOracleTest, ZeroWeightClassifierNeverSampled) {
  Rng rng(9);
  const Network a = RandomClassifier(rng);
  const Network b = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 40);
  AttackerOracleConfig c;
  c.batch = 8;
  EXPECT_EQ(AttackerOracle(c, {a}, MixedStrategy{1.0}, d, 1),
            AttackerOracle(c, {a, b}, MixedStrategy{1.0, 0.0}, d, 1));
}

TEST(AttackerOracleTest, EmptyPoolThrows) {
  Rng rng(10);
  EXPECT_THROW(AttackerOracle({}, {}, MixedStrategy{}, RandomData(rng, 4), 1), ContractError);
}

TEST(AdvRushTest, LinearLossHasZeroCurvature) {
  Rng rng(11);
  const Network net = Linear(rng.NormalMatrix(3, 2), rng.NormalMatrix(3, 1).col(0));
  const Matrix x = rng.NormalMatrix(20, 2);
  EXPECT_NEAR(AdvRushRegularizer(net, x, nn::Loss{nn::LossKind::kLinearOutput}, 0.05), 0.0,
              1e-12);
}

// loss = mean_i 0.5 x_i^T A x_i, so the per-example gradient is A x_i and
// L = mean_i ||A sign(A x_i)|| for every h.
TEST(AdvRushTest, QuadraticIsStepInvariant) {
  Rng rng(12);
  const Matrix b = rng.NormalMatrix(3, 3);
  const Matrix a = b * b.transpose();
  const Matrix x = rng.NormalMatrix(15, 3);
  const InputGradFn grad = [&](const Matrix& in) -> Matrix {
    return in * a / static_cast<double>(in.rows());
  };
  double expected = 0.0;
  for (int i = 0; i < x.rows(); ++i) {
    const Vector g = a * x.row(i).transpose();
    expected += (a * g.unaryExpr([](double v) { return double((v > 0) - (v < 0)); })).norm();
  }
  expected /= x.rows();
  for (double h : {1e-3, 0.05, 1.0}) EXPECT_NEAR(AdvRushRegularizer(grad, x, h), expected, 1e-10);
}

TEST(AdvRushTest, ScalesWithLoss) {
  Rng rng(13);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 20);
  nn::Loss loss = CrossEntropy(d.labels);
  const double base = AdvRushRegularizer(net, d.x, loss, 0.05);
  loss.scale = 3.0;
  EXPECT_NEAR(AdvRushRegularizer(net, d.x, loss, 0.05), 3.0 * base, 1e-10 * std::max(1.0, base));
  EXPECT_GT(base, 0.0);
}

TEST(AdvRushTest, SupernetMatchesExtractedNetworkWhenAlphaIsSharp) {
  Rng rng(14);
  nas::SupernetSpec spec;
  spec.input_dim = 2;
  spec.cell_widths = {4};
  spec.head = nn::LayerSpec{2, Activation::kIdentity};
  nas::Supernet s = nas::Supernet::Random(spec, rng);
  Vector alpha = Vector::Constant(s.arch_count(), -200.0);
  alpha[0] = 200.0;
  s.SetArchParams(alpha);
  const LabeledData d = RandomData(rng, 12);
  EXPECT_NEAR(AdvRushRegularizer(s, d.x, CrossEntropy(d.labels), 0.05),
              AdvRushRegularizer(s.Discretize(), d.x, CrossEntropy(d.labels), 0.05), 1e-9);
}

ClassifierOracleConfig SmallClassifierConfig() {
  ClassifierOracleConfig c;
  c.space.input_dim = 2;
  c.space.cell_widths = {4};
  c.space.head = nn::LayerSpec{2, Activation::kIdentity};
  c.iterations = 20;
  c.batch = 16;
  c.warmup = 5;
  return c;
}

TEST(ClassifierOracleTest, InfiniteWarmupMatchesNoRegularizer) {
  Rng rng(15);
  const LabeledData d = RandomData(rng, 60);
  const std::vector<Perturbation> atk = {Perturbation::Zero(60, 2, 0.1)};
  ClassifierOracleConfig late = SmallClassifierConfig();
  late.warmup = 1 << 30;
  ClassifierOracleConfig off = SmallClassifierConfig();
  off.gamma_reg = 0.0;
  std::vector<Vector> ta, tb;
  const Network na = ClassifierOracle(late, atk, MixedStrategy{1.0}, d, 3, &ta);
  const Network nb = ClassifierOracle(off, atk, MixedStrategy{1.0}, d, 3, &tb);
  ASSERT_EQ(ta.size(), 20u);
  EXPECT_EQ(ta, tb);
  EXPECT_EQ(na, nb);
}

TEST(ClassifierOracleTest, RegularizerChangesAlphaAfterWarmup) {
  Rng rng(16);
  const LabeledData d = RandomData(rng, 60);
  const std::vector<Perturbation> atk = {Perturbation::Zero(60, 2, 0.1)};
  ClassifierOracleConfig on = SmallClassifierConfig();
  on.gamma_reg = 1.0;
  ClassifierOracleConfig off = SmallClassifierConfig();
  off.gamma_reg = 0.0;
  std::vector<Vector> ta, tb;
  ClassifierOracle(on, atk, MixedStrategy{1.0}, d, 3, &ta);
  ClassifierOracle(off, atk, MixedStrategy{1.0}, d, 3, &tb);
  for (int t = 0; t < on.warmup; ++t) EXPECT_EQ(ta[t], tb[t]) << "iteration " << t;
  EXPECT_NE(ta.back(), tb.back());
}

TEST(ClassifierOracleTest, BitReproducible) {
  Rng rng(17);
  const LabeledData d = RandomData(rng, 60);
  const std::vector<Perturbation> atk = {Perturbation::Zero(60, 2, 0.1),
                                         Perturbation{rng.UniformMatrix(60, 2, -0.1, 0.1), 0.1}};
  const ClassifierOracleConfig c = SmallClassifierConfig();
  EXPECT_EQ(ClassifierOracle(c, atk, MixedStrategy{0.5, 0.5}, d, 9),
            ClassifierOracle(c, atk, MixedStrategy{0.5, 0.5}, d, 9));
}

TEST(ClassifierOracleTest, MisalignedPerturbationThrows) {
  Rng rng(18);
  const LabeledData d = RandomData(rng, 60);
  EXPECT_THROW(ClassifierOracle(SmallClassifierConfig(), {Perturbation::Zero(59, 2, 0.1)},
                                MixedStrategy{1.0}, d, 1),
               ContractError);
}

TEST(FinetuneClassifierTest, ZeroLearningRateLeavesWeights) {
  Rng rng(19);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 50);
  FinetuneConfig c;
  c.learning_rate = 0.0;
  EXPECT_EQ(FinetuneClassifier(net, {Perturbation::Zero(50, 2, 0.1)}, MixedStrategy{1.0}, d, c, 1),
            net);
}

TEST(FinetuneClassifierTest, OneFullBatchHopIsOneSgdStep) {
  Rng rng(20);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 24);
  const Perturbation p{rng.UniformMatrix(24, 2, -0.1, 0.1), 0.1};
  FinetuneConfig c;
  c.hops = 1;
  c.batch = 24;
  c.learning_rate = 0.05;
  const Network tuned = FinetuneClassifier(net, {p}, MixedStrategy{1.0}, d, c, 2);
  const Vector expected =
      net.Params() - 0.05 * nn::GradParams(net, d.x + p.delta, CrossEntropy(d.labels));
  EXPECT_LT((tuned.Params() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AtPayoffTest, ZeroPerturbationIsCleanLoss) {
  Rng rng(21);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 30);
  EXPECT_EQ(AtPayoff(net, Perturbation::Zero(30, 2, 0.1), d),
            nn::LossValue(net, d.x, CrossEntropy(d.labels)));
}

TEST(AtPayoffTest, UniformLogitsGiveLogClasses) {
  Rng rng(22);
  for (int classes : {2, 3, 5}) {
    const Network net = Linear(Matrix::Zero(classes, 2), Vector::Zero(classes));
    const LabeledData d = RandomData(rng, 30, 2, classes);
    const Perturbation p{rng.UniformMatrix(30, 2, -0.1, 0.1), 0.1};
    EXPECT_NEAR(AtPayoff(net, p, d), std::log(classes), 1e-12);
  }
}

TEST(AtMetaGameTest, EntriesMatchPayoff) {
  Rng rng(23);
  const LabeledData d = RandomData(rng, 30);
  std::vector<Perturbation> atk = {Perturbation::Zero(30, 2, 0.1),
                                   Perturbation{rng.UniformMatrix(30, 2, -0.1, 0.1), 0.1}};
  std::vector<Network> cls = {RandomClassifier(rng), RandomClassifier(rng), RandomClassifier(rng)};
  const PayoffMatrix u = AtMetaGame(atk, cls, d);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(u(i, j), AtPayoff(cls[j], atk[i], d));
}

TEST(PredictTest, TiesGoToLowestIndex) {
  const Network net = Linear(Matrix::Zero(3, 2), Vector::Zero(3));
  const std::vector<int> pred = Predict(net, Matrix::Ones(4, 2));
  for (int p : pred) EXPECT_EQ(p, 0);
}

TEST(EvaluateRobustTest, ZeroEpsilonIsCleanAccuracy) {
  Rng rng(24);
  const Network net = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 100);
  EXPECT_EQ(EvaluateRobust(net, d, AttackConfig::Pgd(0.0, 20), 1), Accuracy(net, d));
}

TEST(EvaluateRobustTest, ConstantClassifierOnBalancedLabels) {
  const Network net = Linear(Matrix::Zero(2, 2), (Vector(2) << 1.0, 0.0).finished());
  Rng rng(25);
  LabeledData d{rng.UniformMatrix(100, 2, -1, 1), std::vector<int>(100)};
  for (int i = 0; i < 100; ++i) d.labels[i] = i % 2;
  EXPECT_DOUBLE_EQ(EvaluateRobust(net, d, AttackConfig::Pgd(0.1, 20), 1), 0.5);
  EXPECT_DOUBLE_EQ(EvaluateRobust(net, d, AttackConfig::Fgsm(0.1), 1), 0.5);
}

TEST(EvaluateRobustTest, AttackOrderingOnLinearModel) {
  Rng rng(26);
  const Network net = Linear(rng.NormalMatrix(2, 2), rng.NormalMatrix(2, 1).col(0));
  const LabeledData d = RandomData(rng, 300);
  const double clean = Accuracy(net, d);
  const double fgsm = EvaluateRobust(net, d, AttackConfig::Fgsm(0.1), 1);
  const double pgd = EvaluateRobust(net, d, AttackConfig::Pgd(0.1, 20), 1);
  EXPECT_LE(fgsm, clean);
  EXPECT_LE(pgd, fgsm + 1e-12);
}

TEST(EvaluateRobustTest, PureMixtureMatchesSingleClassifierWithoutRandomStart) {
  Rng rng(27);
  const Network a = RandomClassifier(rng);
  const Network b = RandomClassifier(rng);
  const LabeledData d = RandomData(rng, 80);
  const AttackConfig attack = AttackConfig::Pgd(0.1, 10, false);
  EXPECT_EQ(EvaluateRobust({a, b}, MixedStrategy{1.0, 0.0}, d, attack, 3),
            EvaluateRobust(a, d, attack, 3));
}

TEST(TrainStandardTest, ReproducibleAndLearnsSeparableData) {
  Rng rng(28);
  LabeledData d{rng.UniformMatrix(200, 2, -1, 1), std::vector<int>(200)};
  for (int i = 0; i < 200; ++i) d.labels[i] = d.x(i, 0) + d.x(i, 1) > 0;
  const Network net = RandomClassifier(rng);
  const Network a = TrainStandard(net, d, 300, 32, 1e-2, 4);
  EXPECT_EQ(a, TrainStandard(net, d, 300, 32, 1e-2, 4));
  EXPECT_GT(Accuracy(a, d), 0.95);
}

}  // namespace
}  // namespace donas::at
