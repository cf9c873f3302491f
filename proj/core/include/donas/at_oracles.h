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

#ifndef DONAS_AT_ORACLES_H_
#define DONAS_AT_ORACLES_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "donas/datasets.h"
#include "donas/diffnet.h"
#include "donas/metagame.h"
#include "donas/rng.h"
#include "donas/supernet.h"

namespace donas::at {

// Additive perturbation bound to a fixed training set, one row per example.
struct Perturbation {
  Matrix delta;
  double budget = 0.1;

  static Perturbation Zero(int n, int dim, double budget);
  double MaxAbs() const { return delta.size() == 0 ? 0.0 : delta.cwiseAbs().maxCoeff(); }
  bool WithinBudget() const { return MaxAbs() <= budget; }

  friend bool operator==(const Perturbation& a, const Perturbation& b) {
    return a.budget == b.budget && a.delta.rows() == b.delta.rows() &&
           a.delta.cols() == b.delta.cols() && a.delta == b.delta;
  }
};

struct DataDomain {
  double lo = -1.0;
  double hi = 1.0;
};

struct AttackConfig {
  double epsilon = 0.1;  // budget
  double step = 0.025;
  int iterations = 1;
  bool random_start = false;
  std::optional<DataDomain> domain;

  // Throws InputError on epsilon < 0, step <= 0 or iterations < 1.
  void Validate() const;

  static AttackConfig Fgsm(double epsilon);
  static AttackConfig Pgd(double epsilon, int iterations, bool random_start = true);
};

// Cross-entropy of `net` on (x, labels); the attack loss.
nn::Loss CrossEntropy(const std::vector<int>& labels);

// x + epsilon * sign(grad_x CE), sign(0) = 0.
Matrix Fgsm(const nn::Network& net, const Matrix& x, const std::vector<int>& labels,
            double epsilon, std::optional<DataDomain> domain = std::nullopt);

// Signed steps with coordinatewise projection onto the epsilon box around x.
// `rng` is only drawn from when config.random_start is set.
Matrix Pgd(const nn::Network& net, const Matrix& x, const std::vector<int>& labels,
           const AttackConfig& config, Rng& rng);

// Called after every hop with the whole perturbation.
using HopObserver = std::function<void(const Perturbation&)>;

struct AttackerOracleConfig {
  double epsilon = 0.1;
  int hops = 4;    // m
  int epochs = 1;  // passes over the training set
  int batch = 64;
};

// Free adversarial perturbation against the classifier mixture: starting from
// delta = 0, each mini-batch is replayed for m hops; each hop samples a
// classifier from sigma_c and applies delta <- Clip(delta + eps * sign(g)).
Perturbation AttackerOracle(const AttackerOracleConfig& config,
                            const std::vector<nn::Network>& classifiers,
                            const MixedStrategy& sigma_c, const LabeledData& data,
                            uint64_t seed, const HopObserver& observer = {});

// Per-example input gradient of a loss whose value is a batch mean.
using InputGradFn = std::function<Matrix(const Matrix&)>;

// Curvature proxy
//   L = mean_i ||g(x_i + h u_i) - g(x_i)||_2 / h,  u = sign(g(x)),
// where g is the per-example input gradient.
double AdvRushRegularizer(const InputGradFn& grad, const Matrix& x, double h);
double AdvRushRegularizer(const nn::Network& net, const Matrix& x,
                          const nn::Loss& loss, double h);
double AdvRushRegularizer(const nas::Supernet& net, const Matrix& x,
                          const nn::Loss& loss, double h);

struct ClassifierOracleConfig {
  nas::SupernetSpec space;
  int iterations = 300;
  int batch = 64;
  double weight_lr = 1e-2;
  double arch_lr = 3e-3;
  double gamma_reg = 0.01;
  int warmup = 50;          // phi, in iterations
  double curvature_h = 0.05;
  double arch_fd_step = 1e-4;
};

// Input perturbations for the given rows: attacker k ~ sigma_a, delta_k rows.
Matrix SamplePerturbation(const std::vector<Perturbation>& attackers,
                          const MixedStrategy& sigma_a,
                          const std::vector<int>& rows, Rng& rng);

// Alternating one-step search. The first half of `data` is the train split
// (weight steps), the second half the validation split (architecture steps,
// plus gamma_reg * L after `warmup` iterations). Returns the discretized net.
// `alpha_trace`, if given, receives alpha after every architecture step.
nn::Network ClassifierOracle(const ClassifierOracleConfig& config,
                             const std::vector<Perturbation>& attackers,
                             const MixedStrategy& sigma_a, const LabeledData& data,
                             uint64_t seed,
                             std::vector<Vector>* alpha_trace = nullptr);

struct FinetuneConfig {
  int hops = 4;
  int epochs = 1;
  int batch = 64;
  double learning_rate = 1e-2;
};

// SGD where each mini-batch is replayed m times with a fresh delta ~ sigma_a
// per hop.
nn::Network FinetuneClassifier(nn::Network net, const std::vector<Perturbation>& attackers,
                               const MixedStrategy& sigma_a, const LabeledData& data,
                               const FinetuneConfig& config, uint64_t seed);

// Mean cross-entropy on (x + delta, y); the attacker's (row) payoff.
double AtPayoff(const nn::Network& classifier, const Perturbation& delta,
                const LabeledData& eval);

// Rows: attackers, columns: classifiers.
PayoffMatrix AtMetaGame(const std::vector<Perturbation>& attackers,
                        const std::vector<nn::Network>& classifiers,
                        const LabeledData& eval);

// Argmax of the logits, lowest index on ties.
std::vector<int> Predict(const nn::Network& net, const Matrix& x);
double Accuracy(const nn::Network& net, const LabeledData& data);

// Fraction classified correctly after the configured attack.
double EvaluateRobust(const nn::Network& net, const LabeledData& data,
                      const AttackConfig& attack, uint64_t seed);
// Mixture version: one classifier is sampled per example and attacked
// white-box.
double EvaluateRobust(const std::vector<nn::Network>& classifiers,
                      const MixedStrategy& sigma_c, const LabeledData& data,
                      const AttackConfig& attack, uint64_t seed);

// Plain (clean) mini-batch training with Adam; the standard baseline.
nn::Network TrainStandard(nn::Network net, const LabeledData& data, int steps,
                          int batch, double lr, uint64_t seed);

}  // namespace donas::at

#endif  // DONAS_AT_ORACLES_H_
