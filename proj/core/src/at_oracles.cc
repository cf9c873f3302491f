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

#include <algorithm>
#include <cmath>
#include <limits>

namespace donas::at {
namespace {

Matrix Sign(const Matrix& g) { return g.array().sign().matrix(); }

Matrix ClipBox(const Matrix& x, const Matrix& center, double eps) {
  return x.cwiseMax((center.array() - eps).matrix()).cwiseMin((center.array() + eps).matrix());
}

void ClipDomain(Matrix& x, const std::optional<DataDomain>& domain) {
  if (domain) x = x.cwiseMax(domain->lo).cwiseMin(domain->hi);
}

Matrix Rows(const Matrix& x, const std::vector<int>& rows) {
  Matrix out(rows.size(), x.cols());
  for (size_t r = 0; r < rows.size(); ++r) out.row(r) = x.row(rows[r]);
  return out;
}

std::vector<int> Pick(const std::vector<int>& labels, const std::vector<int>& rows) {
  std::vector<int> out(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) out[r] = labels[rows[r]];
  return out;
}

void CheckMix(bool non_empty, int pool, int sigma, const char* who) {
  DONAS_REQUIRE(non_empty, std::string(who) + ": opponent pool is empty");
  DONAS_REQUIRE(pool == sigma,
                std::string(who) + ": mixed strategy does not match the pool");
}

Matrix SupernetInputGrad(const nas::Supernet& net, const Matrix& x, const nn::Loss& loss) {
  const nas::SupernetTrace t = net.Trace(x);
  const nn::LossEval le = nn::EvaluateLoss(loss, t.output);
  return net.Backward(t, le.output_grad).input;
}

}  // namespace

Perturbation Perturbation::Zero(int n, int dim, double budget) {
  return Perturbation{Matrix::Zero(n, dim), budget};
}

void AttackConfig::Validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw InputError("attack epsilon must be finite and >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw InputError("attack step must be > 0");
  if (iterations < 1) throw InputError("attack iterations must be >= 1");
  if (domain && !(domain->hi > domain->lo))
    throw InputError("attack domain requires hi > lo");
}

AttackConfig AttackConfig::Fgsm(double epsilon) {
  AttackConfig c;
  c.epsilon = epsilon;
  c.step = epsilon > 0.0 ? epsilon : 1.0;
  c.iterations = 1;
  c.random_start = false;
  return c;
}

AttackConfig AttackConfig::Pgd(double epsilon, int iterations, bool random_start) {
  AttackConfig c;
  c.epsilon = epsilon;
  c.step = epsilon > 0.0 ? epsilon / 4.0 : 1.0;
  c.iterations = iterations;
  c.random_start = random_start;
  return c;
}

nn::Loss CrossEntropy(const std::vector<int>& labels) {
  nn::Loss l{nn::LossKind::kCrossEntropy};
  l.labels = labels;
  return l;
}

Matrix Fgsm(const nn::Network& net, const Matrix& x, const std::vector<int>& labels,
            double epsilon, std::optional<DataDomain> domain) {
  DONAS_REQUIRE(epsilon >= 0.0, "Fgsm: epsilon must be >= 0");
  const Matrix g = nn::GradInput(net, x, CrossEntropy(labels));
  Matrix adv = x + epsilon * Sign(g);
  ClipDomain(adv, domain);
  return adv;
}

Matrix Pgd(const nn::Network& net, const Matrix& x, const std::vector<int>& labels,
           const AttackConfig& config, Rng& rng) {
  config.Validate();
  const nn::Loss loss = CrossEntropy(labels);
  Matrix adv = x;
  if (config.random_start) {
    adv += rng.UniformMatrix(static_cast<int>(x.rows()), static_cast<int>(x.cols()),
                             -config.epsilon, config.epsilon);
    ClipDomain(adv, config.domain);
  }
  for (int t = 0; t < config.iterations; ++t) {
    const Matrix g = nn::GradInput(net, adv, loss);
    adv = ClipBox(adv + config.step * Sign(g), x, config.epsilon);
    ClipDomain(adv, config.domain);
  }
  return adv;
}

Perturbation AttackerOracle(const AttackerOracleConfig& config,
                            const std::vector<nn::Network>& classifiers,
                            const MixedStrategy& sigma_c, const LabeledData& data,
                            uint64_t seed, const HopObserver& observer) {
  CheckMix(!classifiers.empty(), static_cast<int>(classifiers.size()), sigma_c.size(),
           "AttackerOracle");
  DONAS_REQUIRE(config.hops >= 1 && config.epochs >= 0 && config.batch >= 1,
                "AttackerOracle: invalid schedule");
  const int n = data.size();
  Perturbation pert = Perturbation::Zero(n, static_cast<int>(data.x.cols()), config.epsilon);
  Rng root(seed);
  Rng order = root.Substream("order");
  Rng pick = root.Substream("pick");
  for (int e = 0; e < config.epochs; ++e) {
    const std::vector<int> perm = order.Permutation(n);
    for (int b = 0; b < n; b += config.batch) {
      const std::vector<int> rows(perm.begin() + b,
                                  perm.begin() + std::min(n, b + config.batch));
      const Matrix xb = Rows(data.x, rows);
      const nn::Loss loss = CrossEntropy(Pick(data.labels, rows));
      Matrix db = Rows(pert.delta, rows);
      for (int h = 0; h < config.hops; ++h) {
        const int k = pick.Categorical(sigma_c.probs());
        const Matrix g = nn::GradInput(classifiers[k], xb + db, loss);
        db = (db + config.epsilon * Sign(g)).cwiseMax(-config.epsilon).cwiseMin(config.epsilon);
        for (size_t r = 0; r < rows.size(); ++r) pert.delta.row(rows[r]) = db.row(r);
        if (!pert.WithinBudget()) {
          throw ContractError("AttackerOracle: perturbation left the budget ball");
        }
        if (observer) observer(pert);
      }
    }
  }
  return pert;
}

double AdvRushRegularizer(const InputGradFn& grad, const Matrix& x, double h) {
  DONAS_REQUIRE(h > 0.0, "AdvRushRegularizer: h must be > 0");
  const int n = static_cast<int>(x.rows());
  DONAS_REQUIRE(n >= 1, "AdvRushRegularizer: empty batch");
  const Matrix g0 = grad(x) * static_cast<double>(n);
  const Matrix g1 = grad(x + h * Sign(g0)) * static_cast<double>(n);
  return (g1 - g0).rowwise().norm().mean() / h;
}

double AdvRushRegularizer(const nn::Network& net, const Matrix& x, const nn::Loss& loss,
                          double h) {
  return AdvRushRegularizer(
      [&](const Matrix& in) { return nn::GradInput(net, in, loss); }, x, h);
}

double AdvRushRegularizer(const nas::Supernet& net, const Matrix& x, const nn::Loss& loss,
                          double h) {
  return AdvRushRegularizer(
      [&](const Matrix& in) { return SupernetInputGrad(net, in, loss); }, x, h);
}

Matrix SamplePerturbation(const std::vector<Perturbation>& attackers,
                          const MixedStrategy& sigma_a, const std::vector<int>& rows,
                          Rng& rng) {
  CheckMix(!attackers.empty(), static_cast<int>(attackers.size()), sigma_a.size(),
           "SamplePerturbation");
  const int k = rng.Categorical(sigma_a.probs());
  return Rows(attackers[k].delta, rows);
}

nn::Network ClassifierOracle(const ClassifierOracleConfig& config,
                             const std::vector<Perturbation>& attackers,
                             const MixedStrategy& sigma_a, const LabeledData& data,
                             uint64_t seed, std::vector<Vector>* alpha_trace) {
  CheckMix(!attackers.empty(), static_cast<int>(attackers.size()), sigma_a.size(),
           "ClassifierOracle");
  const int n = data.size();
  DONAS_REQUIRE(n >= 2, "ClassifierOracle: need at least two examples");
  for (const Perturbation& p : attackers) {
    DONAS_REQUIRE(p.delta.rows() == n && p.delta.cols() == data.x.cols(),
                  "ClassifierOracle: perturbation is not aligned with the data");
  }
  Rng root(seed);
  Rng init = root.Substream("init");
  Rng batches = root.Substream("batch");
  Rng perturb = root.Substream("perturb");
  nas::Supernet net = nas::Supernet::Random(config.space, init);
  const int n_train = n / 2;
  const int n_val = n - n_train;

  Vector alpha = net.ArchParams();
  Vector weights = net.WeightParams();
  nn::OptimState weight_opt = nn::OptimState::Adam(config.weight_lr);
  nn::OptimState arch_opt = nn::OptimState::Adam(config.arch_lr);
  std::vector<int> rows(config.batch);

  for (int t = 0; t < config.iterations; ++t) {
    for (int& r : rows) r = batches.Index(n_train);
    {
      const Matrix x = Rows(data.x, rows) + SamplePerturbation(attackers, sigma_a, rows, perturb);
      const nn::Loss loss = CrossEntropy(Pick(data.labels, rows));
      const nas::SupernetTrace tr = net.Trace(x);
      const nn::LossEval le = nn::EvaluateLoss(loss, tr.output);
      nn::ApplyStep(weights, net.Backward(tr, le.output_grad).weights, weight_opt);
      net.SetWeightParams(weights);
    }
    for (int& r : rows) r = n_train + batches.Index(n_val);
    {
      const Matrix x = Rows(data.x, rows) + SamplePerturbation(attackers, sigma_a, rows, perturb);
      const nn::Loss loss = CrossEntropy(Pick(data.labels, rows));
      const nas::SupernetTrace tr = net.Trace(x);
      const nn::LossEval le = nn::EvaluateLoss(loss, tr.output);
      Vector grad = net.Backward(tr, le.output_grad).arch;
      if (t >= config.warmup && config.gamma_reg != 0.0) {
        // Central differences in alpha; the cell count keeps alpha small.
        nas::Supernet probe = net;
        Vector a = alpha;
        for (int i = 0; i < a.size(); ++i) {
          const double keep = a[i];
          a[i] = keep + config.arch_fd_step;
          probe.SetArchParams(a);
          const double up = AdvRushRegularizer(probe, x, loss, config.curvature_h);
          a[i] = keep - config.arch_fd_step;
          probe.SetArchParams(a);
          const double down = AdvRushRegularizer(probe, x, loss, config.curvature_h);
          a[i] = keep;
          grad[i] += config.gamma_reg * (up - down) / (2.0 * config.arch_fd_step);
        }
      }
      nn::ApplyStep(alpha, grad, arch_opt);
      net.SetArchParams(alpha);
      if (alpha_trace) alpha_trace->push_back(alpha);
    }
  }
  return net.Discretize();
}

nn::Network FinetuneClassifier(nn::Network net, const std::vector<Perturbation>& attackers,
                               const MixedStrategy& sigma_a, const LabeledData& data,
                               const FinetuneConfig& config, uint64_t seed) {
  CheckMix(!attackers.empty(), static_cast<int>(attackers.size()), sigma_a.size(),
           "FinetuneClassifier");
  DONAS_REQUIRE(config.hops >= 1 && config.epochs >= 0 && config.batch >= 1,
                "FinetuneClassifier: invalid schedule");
  const int n = data.size();
  Rng root(seed);
  Rng order = root.Substream("order");
  Rng perturb = root.Substream("perturb");
  nn::OptimState opt = nn::OptimState::Sgd(config.learning_rate);
  for (int e = 0; e < config.epochs; ++e) {
    const std::vector<int> perm = order.Permutation(n);
    for (int b = 0; b < n; b += config.batch) {
      const std::vector<int> rows(perm.begin() + b,
                                  perm.begin() + std::min(n, b + config.batch));
      const Matrix xb = Rows(data.x, rows);
      const nn::Loss loss = CrossEntropy(Pick(data.labels, rows));
      for (int h = 0; h < config.hops; ++h) {
        const Matrix x = xb + SamplePerturbation(attackers, sigma_a, rows, perturb);
        const Vector grad = nn::GradParams(net, x, loss);
        net = nn::Step(std::move(net), grad, opt);
      }
    }
  }
  return net;
}

double AtPayoff(const nn::Network& classifier, const Perturbation& delta,
                const LabeledData& eval) {
  DONAS_REQUIRE(delta.delta.rows() == eval.x.rows() && delta.delta.cols() == eval.x.cols(),
                "AtPayoff: perturbation is not aligned with the evaluation set");
  return nn::LossValue(classifier, eval.x + delta.delta, CrossEntropy(eval.labels));
}

PayoffMatrix AtMetaGame(const std::vector<Perturbation>& attackers,
                        const std::vector<nn::Network>& classifiers,
                        const LabeledData& eval) {
  Matrix u(attackers.size(), classifiers.size());
  for (size_t i = 0; i < attackers.size(); ++i)
    for (size_t j = 0; j < classifiers.size(); ++j)
      u(i, j) = AtPayoff(classifiers[j], attackers[i], eval);
  return PayoffMatrix(std::move(u));
}

std::vector<int> Predict(const nn::Network& net, const Matrix& x) {
  const Matrix logits = net.Forward(x);
  std::vector<int> out(logits.rows());
  for (int i = 0; i < logits.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols(); ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    out[i] = best;
  }
  return out;
}

double Accuracy(const nn::Network& net, const LabeledData& data) {
  if (data.size() == 0) return 0.0;
  const std::vector<int> pred = Predict(net, data.x);
  int correct = 0;
  for (int i = 0; i < data.size(); ++i) correct += pred[i] == data.labels[i];
  return static_cast<double>(correct) / data.size();
}

namespace {

Matrix Attack(const nn::Network& net, const Matrix& x, const std::vector<int>& labels,
              const AttackConfig& attack, Rng& rng) {
  if (attack.epsilon == 0.0) return x;
  return Pgd(net, x, labels, attack, rng);
}

}  // namespace

double EvaluateRobust(const nn::Network& net, const LabeledData& data,
                      const AttackConfig& attack, uint64_t seed) {
  attack.Validate();
  Rng rng = Rng(seed).Substream("attack");
  const Matrix adv = Attack(net, data.x, data.labels, attack, rng);
  return Accuracy(net, LabeledData{adv, data.labels});
}

double EvaluateRobust(const std::vector<nn::Network>& classifiers,
                      const MixedStrategy& sigma_c, const LabeledData& data,
                      const AttackConfig& attack, uint64_t seed) {
  CheckMix(!classifiers.empty(), static_cast<int>(classifiers.size()), sigma_c.size(),
           "EvaluateRobust");
  attack.Validate();
  Rng root(seed);
  Rng pick = root.Substream("pick");
  std::vector<std::vector<int>> groups(classifiers.size());
  for (int i = 0; i < data.size(); ++i)
    groups[pick.Categorical(sigma_c.probs())].push_back(i);
  int correct = 0;
  for (size_t k = 0; k < classifiers.size(); ++k) {
    if (groups[k].empty()) continue;
    const LabeledData part = Gather(data, groups[k]);
    Rng rng = root.Substream("attack", k);
    const Matrix adv = Attack(classifiers[k], part.x, part.labels, attack, rng);
    const std::vector<int> pred = Predict(classifiers[k], adv);
    for (int i = 0; i < part.size(); ++i) correct += pred[i] == part.labels[i];
  }
  return data.size() == 0 ? 0.0 : static_cast<double>(correct) / data.size();
}

nn::Network TrainStandard(nn::Network net, const LabeledData& data, int steps, int batch,
                          double lr, uint64_t seed) {
  DONAS_REQUIRE(data.size() >= 1 && batch >= 1, "TrainStandard: empty data or batch");
  Rng rng(seed);
  nn::OptimState opt = nn::OptimState::Adam(lr);
  std::vector<int> rows(batch);
  for (int s = 0; s < steps; ++s) {
    for (int& r : rows) r = rng.Index(data.size());
    const Vector grad = nn::GradParams(net, Rows(data.x, rows), CrossEntropy(Pick(data.labels, rows)));
    net = nn::Step(std::move(net), grad, opt);
  }
  return net;
}

}  // namespace donas::at
