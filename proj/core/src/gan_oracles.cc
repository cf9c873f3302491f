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

#include "donas/gan_oracles.h"

#include <algorithm>
#include <cmath>

#include "donas/rng.h"

namespace donas::gan {
namespace {

using nn::Loss;
using nn::LossKind;

Matrix SampleRows(const Matrix& data, int n, Rng& rng) {
  DONAS_REQUIRE(data.rows() > 0, "no real samples to draw from");
  Matrix out(n, data.cols());
  for (int i = 0; i < n; ++i) out.row(i) = data.row(rng.Index(static_cast<int>(data.rows())));
  return out;
}

Vector DiscriminatorScores(const nn::Network& d, const Matrix& x) {
  return d.Forward(x).col(0);
}

double MeanLog(const Vector& p) {
  return nn::PerExampleLoss(Loss{LossKind::kLogProb}, p).mean();
}

double MeanLogOneMinus(const Vector& p) {
  return nn::PerExampleLoss(Loss{LossKind::kLogOneMinusProb}, p).mean();
}

// Discriminator objective over a stacked batch [real; fake_1; ...; fake_J]
// where block j has weight w_j:
//   mean log D(real) + sum_j w_j mean log(1 - D(fake_j)).
// Returns the value and dvalue/d(output).
struct StackedEval {
  double value = 0.0;
  Matrix output_grad;
};

StackedEval StackedDiscriminatorObjective(const Matrix& out, int block,
                                          const std::vector<double>& fake_weights) {
  StackedEval ev;
  ev.output_grad = Matrix::Zero(out.rows(), 1);
  const auto real = nn::EvaluateLoss(Loss{LossKind::kLogProb}, out.topRows(block));
  ev.value = real.value;
  ev.output_grad.topRows(block) = real.output_grad;
  for (size_t j = 0; j < fake_weights.size(); ++j) {
    Loss l{LossKind::kLogOneMinusProb};
    l.scale = fake_weights[j];
    const auto fake =
        nn::EvaluateLoss(l, out.middleRows(block * (j + 1), block));
    ev.value += fake.value;
    ev.output_grad.middleRows(block * (j + 1), block) = fake.output_grad;
  }
  return ev;
}

// [real; G_j(latent) for each listed generator].
Matrix StackFakes(const Matrix& real, const Matrix& latent,
                  const std::vector<const nn::Network*>& gens) {
  Matrix x(real.rows() * (1 + gens.size()), real.cols());
  x.topRows(real.rows()) = real;
  for (size_t j = 0; j < gens.size(); ++j) {
    x.middleRows(real.rows() * (j + 1), real.rows()) = gens[j]->Forward(latent);
  }
  return x;
}

void CheckPool(bool non_empty, int pool, int sigma, const char* who) {
  DONAS_REQUIRE(non_empty, std::string(who) + ": opponent pool is empty");
  DONAS_REQUIRE(pool == sigma,
                std::string(who) + ": mixed strategy does not match the pool");
}

}  // namespace

double GanPayoff(const nn::Network& generator, const nn::Network& discriminator,
                 const GanEvalSet& eval) {
  const Vector real = DiscriminatorScores(discriminator, eval.real);
  const Vector fake = DiscriminatorScores(discriminator, generator.Forward(eval.latent));
  return -(MeanLog(real) + MeanLogOneMinus(fake));
}

ObjectiveEval MixedGeneratorObjective(const Matrix& fake,
                                      const std::vector<nn::Network>& discriminators,
                                      const MixedStrategy& sigma_d) {
  CheckPool(!discriminators.empty(), static_cast<int>(discriminators.size()),
            sigma_d.size(), "MixedGeneratorObjective");
  ObjectiveEval ev;
  ev.grad = Matrix::Zero(fake.rows(), fake.cols());
  for (size_t j = 0; j < discriminators.size(); ++j) {
    const double w = sigma_d[static_cast<int>(j)];
    if (w == 0.0) continue;
    const nn::ForwardTrace t = discriminators[j].Trace(fake);
    Loss l{LossKind::kLogOneMinusProb};
    l.scale = w;
    const nn::LossEval le = nn::EvaluateLoss(l, t.output());
    ev.value += le.value;
    ev.grad += discriminators[j].Backward(t, le.output_grad).input;
  }
  return ev;
}

double MixedDiscriminatorObjective(const nn::Network& discriminator,
                                   const Matrix& real, const Matrix& latent,
                                   const std::vector<nn::Network>& generators,
                                   const MixedStrategy& sigma_g) {
  CheckPool(!generators.empty(), static_cast<int>(generators.size()),
            sigma_g.size(), "MixedDiscriminatorObjective");
  double value = MeanLog(DiscriminatorScores(discriminator, real));
  for (size_t j = 0; j < generators.size(); ++j) {
    const double w = sigma_g[static_cast<int>(j)];
    if (w == 0.0) continue;
    value += w * MeanLogOneMinus(
                     DiscriminatorScores(discriminator, generators[j].Forward(latent)));
  }
  return value;
}

nn::Network GeneratorOracle(const GanOracleConfig& config,
                            const std::vector<nn::Network>& discriminators,
                            const MixedStrategy& sigma_d, uint64_t seed) {
  CheckPool(!discriminators.empty(), static_cast<int>(discriminators.size()),
            sigma_d.size(), "GeneratorOracle");
  Rng root(seed);
  Rng init = root.Substream("init");
  Rng noise = root.Substream("latent");
  nas::Supernet g = nas::Supernet::Random(config.generator_space, init);
  const int m = config.batch;
  const int dz = g.input_dim();
  Vector alpha = g.ArchParams();
  Vector weights = g.WeightParams();
  nn::OptimState arch_opt = nn::OptimState::Adam(config.arch_lr);
  nn::OptimState weight_opt = nn::OptimState::Adam(config.weight_lr);

  for (int step = 0; step < config.steps; ++step) {
    const Matrix z = noise.NormalMatrix(2 * m, dz);
    {
      const nas::SupernetTrace t = g.Trace(z.topRows(m));
      const ObjectiveEval obj = MixedGeneratorObjective(t.output, discriminators, sigma_d);
      nn::ApplyStep(alpha, g.Backward(t, obj.grad).arch, arch_opt);
      g.SetArchParams(alpha);
    }
    {
      const nas::SupernetTrace t = g.Trace(z.bottomRows(m));
      const ObjectiveEval obj = MixedGeneratorObjective(t.output, discriminators, sigma_d);
      nn::ApplyStep(weights, g.Backward(t, obj.grad).weights, weight_opt);
      g.SetWeightParams(weights);
    }
  }

  Rng select = root.Substream("select");
  const Matrix zs = select.NormalMatrix(config.selection_batch, dz);
  std::vector<nn::Network> candidates;
  for (const nas::ArchChoice& c : nas::SampleTopK(g, config.top_k))
    candidates.push_back(g.Extract(c));
  const int best = nas::SelectByLoss(candidates, [&](const nn::Network& cand) {
    return MixedGeneratorObjective(cand.Forward(zs), discriminators, sigma_d).value;
  });
  return candidates[best];
}

nn::Network DiscriminatorOracle(const GanOracleConfig& config,
                                const std::vector<nn::Network>& generators,
                                const MixedStrategy& sigma_g,
                                const Matrix& data, uint64_t seed) {
  CheckPool(!generators.empty(), static_cast<int>(generators.size()),
            sigma_g.size(), "DiscriminatorOracle");
  Rng root(seed);
  Rng init = root.Substream("init");
  Rng noise = root.Substream("latent");
  Rng real_rng = root.Substream("real");
  nas::Supernet d = nas::Supernet::Random(config.discriminator_space, init);
  const int m = config.batch;
  const int dz = generators.front().input_dim();

  std::vector<const nn::Network*> active;
  std::vector<double> weights_g;
  for (size_t j = 0; j < generators.size(); ++j) {
    if (sigma_g[static_cast<int>(j)] == 0.0) continue;
    active.push_back(&generators[j]);
    weights_g.push_back(sigma_g[static_cast<int>(j)]);
  }

  Vector alpha = d.ArchParams();
  Vector weights = d.WeightParams();
  nn::OptimState arch_opt = nn::OptimState::Adam(config.arch_lr, nn::Direction::kAscent);
  nn::OptimState weight_opt = nn::OptimState::Adam(config.weight_lr, nn::Direction::kAscent);

  for (int step = 0; step < config.steps; ++step) {
    const Matrix z = noise.NormalMatrix(2 * m, dz);
    const Matrix x = SampleRows(data, 2 * m, real_rng);
    {
      const Matrix stacked = StackFakes(x.topRows(m), z.topRows(m), active);
      const nas::SupernetTrace t = d.Trace(stacked);
      const StackedEval ev = StackedDiscriminatorObjective(t.output, m, weights_g);
      nn::ApplyStep(alpha, d.Backward(t, ev.output_grad).arch, arch_opt);
      d.SetArchParams(alpha);
    }
    {
      const Matrix stacked = StackFakes(x.bottomRows(m), z.bottomRows(m), active);
      const nas::SupernetTrace t = d.Trace(stacked);
      const StackedEval ev = StackedDiscriminatorObjective(t.output, m, weights_g);
      nn::ApplyStep(weights, d.Backward(t, ev.output_grad).weights, weight_opt);
      d.SetWeightParams(weights);
    }
  }

  Rng select = root.Substream("select");
  const Matrix zs = select.NormalMatrix(config.selection_batch, dz);
  const Matrix xs = SampleRows(data, config.selection_batch, select);
  std::vector<nn::Network> candidates;
  for (const nas::ArchChoice& c : nas::SampleTopK(d, config.top_k))
    candidates.push_back(d.Extract(c));
  const int best = nas::SelectByLoss(candidates, [&](const nn::Network& cand) {
    return -MixedDiscriminatorObjective(cand, xs, zs, generators, sigma_g);
  });
  return candidates[best];
}

double HarmonicMean(std::span<const double> values) {
  if (values.empty()) return 1.0;
  double inv = 0.0;
  for (double v : values) inv += 1.0 / std::max(v, 1e-8);
  return static_cast<double>(values.size()) / inv;
}

Vector HarmonicWeights(const std::vector<nn::Network>& generators, int index,
                       const nn::Network& discriminator, const Matrix& latent) {
  DONAS_REQUIRE(index >= 0 && index < static_cast<int>(generators.size()),
                "HarmonicWeights: generator index out of range");
  const int n = static_cast<int>(latent.rows());
  Matrix miss(n, index);
  for (int j = 0; j < index; ++j) {
    miss.col(j) = (1.0 - DiscriminatorScores(discriminator, generators[j].Forward(latent)).array())
                      .matrix();
  }
  Vector phi(n);
  std::vector<double> row(index);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < index; ++j) row[j] = miss(i, j);
    phi[i] = HarmonicMean(row);
  }
  return phi;
}

Vector NashTheta(const std::vector<nn::Network>& generators, int index,
                 const nn::Network& discriminator, const MixedStrategy& sigma_g,
                 const Matrix& latent) {
  DONAS_REQUIRE(index >= 0 && index < static_cast<int>(generators.size()),
                "NashTheta: generator index out of range");
  DONAS_REQUIRE(sigma_g.size() == static_cast<int>(generators.size()),
                "NashTheta: sigma_g does not match the generator pool");
  Vector theta = Vector::Ones(latent.rows());
  for (int k = 0; k < index; ++k) {
    if (sigma_g[k] == 0.0) continue;
    const Vector d = DiscriminatorScores(discriminator, generators[k].Forward(latent));
    theta = (theta.array() * sigma_g[k] * (1.0 - d.array())).matrix();
  }
  return theta;
}

ParamObjective WeightedFoolingObjective(const nn::Network& generator,
                                        const nn::Network& discriminator,
                                        const Matrix& latent,
                                        const Vector& weights) {
  DONAS_REQUIRE(weights.size() == latent.rows(),
                "WeightedFoolingObjective: one weight per latent row required");
  const int n = static_cast<int>(latent.rows());
  const nn::ForwardTrace gt = generator.Trace(latent);
  const nn::ForwardTrace dt = discriminator.Trace(gt.output());
  ParamObjective out;
  out.value = weights.dot(dt.output().col(0)) / n;
  const Matrix d_out = weights / n;
  const Matrix d_fake = discriminator.Backward(dt, d_out).input;
  out.grad = generator.Backward(gt, d_fake).params;
  return out;
}

namespace {

// One ascent step of E[log D(x)] + sum_k w_k E[log(1 - D(G_k(z)))].
void DiscriminatorStep(nn::Network& d, const std::vector<nn::Network>& gens,
                       const Matrix& real, const Matrix& latent,
                       nn::OptimState& opt) {
  std::vector<const nn::Network*> all;
  for (const nn::Network& g : gens) all.push_back(&g);
  const std::vector<double> w(gens.size(), 1.0);
  const Matrix stacked = StackFakes(real, latent, all);
  const nn::ForwardTrace t = d.Trace(stacked);
  const StackedEval ev = StackedDiscriminatorObjective(t.output(), static_cast<int>(real.rows()), w);
  const Vector grad = d.Backward(t, ev.output_grad).params;
  d = nn::Step(std::move(d), grad, opt);
}

}  // namespace

void FinetuneHarmonic(std::vector<nn::Network>& generators,
                      nn::Network& discriminator, const FinetuneConfig& config,
                      const Matrix& data, uint64_t seed) {
  DONAS_REQUIRE(!generators.empty(), "FinetuneHarmonic: no generators");
  Rng rng(seed);
  const int dz = generators.front().input_dim();
  std::vector<nn::OptimState> gen_opt(
      generators.size(), nn::OptimState::Adam(config.generator_lr, nn::Direction::kAscent));
  nn::OptimState d_opt = nn::OptimState::Adam(config.discriminator_lr, nn::Direction::kAscent);
  for (int r = 0; r < config.rounds; ++r) {
    for (int s = 0; s < config.steps_per_round; ++s) {
      const Matrix z = rng.NormalMatrix(config.batch, dz);
      for (size_t i = 0; i < generators.size(); ++i) {
        const Vector phi = HarmonicWeights(generators, static_cast<int>(i), discriminator, z);
        const ParamObjective obj =
            WeightedFoolingObjective(generators[i], discriminator, z, phi);
        generators[i] = nn::Step(std::move(generators[i]), obj.grad, gen_opt[i]);
      }
      const Matrix x = SampleRows(data, config.batch, rng);
      const Matrix zd = rng.NormalMatrix(config.batch, dz);
      DiscriminatorStep(discriminator, generators, x, zd, d_opt);
    }
  }
}

PayoffMatrix GanMetaGame(const std::vector<nn::Network>& generators,
                         const std::vector<nn::Network>& discriminators,
                         const GanEvalSet& eval) {
  Matrix u(generators.size(), discriminators.size());
  for (size_t i = 0; i < generators.size(); ++i)
    for (size_t j = 0; j < discriminators.size(); ++j)
      u(i, j) = GanPayoff(generators[i], discriminators[j], eval);
  return PayoffMatrix(std::move(u));
}

SolveResult FinetuneNash(std::vector<nn::Network>& generators,
                         std::vector<nn::Network>& discriminators,
                         MixedStrategy sigma_g, MixedStrategy sigma_d,
                         const FinetuneConfig& config, const Matrix& data,
                         const GanEvalSet& eval, uint64_t seed) {
  DONAS_REQUIRE(!generators.empty() && !discriminators.empty(),
                "FinetuneNash: empty pool");
  DONAS_REQUIRE(sigma_g.size() == static_cast<int>(generators.size()) &&
                    sigma_d.size() == static_cast<int>(discriminators.size()),
                "FinetuneNash: mixed strategies do not match the pools");
  Rng rng(seed);
  const int dz = generators.front().input_dim();
  std::vector<nn::OptimState> gen_opt(
      generators.size(), nn::OptimState::Adam(config.generator_lr, nn::Direction::kAscent));
  std::vector<nn::OptimState> d_opt(
      discriminators.size(),
      nn::OptimState::Adam(config.discriminator_lr, nn::Direction::kAscent));
  SolveResult solved{sigma_g, sigma_d, 0.0};
  for (int r = 0; r < config.rounds; ++r) {
    for (int s = 0; s < config.steps_per_round; ++s) {
      const Matrix z = rng.NormalMatrix(config.batch, dz);
      for (size_t i = 0; i < generators.size(); ++i) {
        Vector grad = Vector::Zero(generators[i].param_count());
        for (size_t j = 0; j < discriminators.size(); ++j) {
          const double wd = sigma_d[static_cast<int>(j)];
          if (wd == 0.0) continue;
          const Vector theta = NashTheta(generators, static_cast<int>(i),
                                         discriminators[j], sigma_g, z);
          grad += WeightedFoolingObjective(generators[i], discriminators[j], z,
                                           wd * theta)
                      .grad;
        }
        generators[i] = nn::Step(std::move(generators[i]), grad, gen_opt[i]);
      }
      const Matrix x = SampleRows(data, config.batch, rng);
      const Matrix zd = rng.NormalMatrix(config.batch, dz);
      for (size_t j = 0; j < discriminators.size(); ++j) {
        DiscriminatorStep(discriminators[j], generators, x, zd, d_opt[j]);
      }
    }
    solved = SolveZeroSum(GanMetaGame(generators, discriminators, eval));
    sigma_g = solved.row_strategy;
    sigma_d = solved.col_strategy;
  }
  if (config.rounds == 0) {
    solved = SolveZeroSum(GanMetaGame(generators, discriminators, eval));
  }
  return solved;
}

MixtureSample SampleMixture(const std::vector<nn::Network>& generators,
                            const MixedStrategy& sigma_g, int n, uint64_t seed) {
  DONAS_REQUIRE(sigma_g.size() == static_cast<int>(generators.size()) && !generators.empty(),
                "SampleMixture: mixed strategy does not match the pool");
  Rng rng(seed);
  const int dz = generators.front().input_dim();
  MixtureSample out;
  out.generator_index.resize(n);
  Matrix z(n, dz);
  for (int i = 0; i < n; ++i) {
    out.generator_index[i] = rng.Categorical(sigma_g.probs());
    for (int c = 0; c < dz; ++c) z(i, c) = rng.Normal();
  }
  out.samples.resize(n, generators.front().output_dim());
  for (size_t g = 0; g < generators.size(); ++g) {
    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
      if (out.generator_index[i] == static_cast<int>(g)) rows.push_back(i);
    if (rows.empty()) continue;
    Matrix zg(rows.size(), dz);
    for (size_t r = 0; r < rows.size(); ++r) zg.row(r) = z.row(rows[r]);
    const Matrix xg = generators[g].Forward(zg);
    for (size_t r = 0; r < rows.size(); ++r) out.samples.row(rows[r]) = xg.row(r);
  }
  return out;
}

VanillaGanResult TrainVanillaGan(nn::Network generator, nn::Network discriminator,
                                 int steps, int batch, double lr,
                                 const Matrix& data, uint64_t seed) {
  Rng rng(seed);
  const int dz = generator.input_dim();
  nn::OptimState g_opt = nn::OptimState::Adam(lr);
  nn::OptimState d_opt = nn::OptimState::Adam(lr, nn::Direction::kAscent);
  for (int s = 0; s < steps; ++s) {
    const Matrix x = SampleRows(data, batch, rng);
    const Matrix zd = rng.NormalMatrix(batch, dz);
    DiscriminatorStep(discriminator, {generator}, x, zd, d_opt);

    const Matrix z = rng.NormalMatrix(batch, dz);
    const nn::ForwardTrace gt = generator.Trace(z);
    const nn::ForwardTrace dt = discriminator.Trace(gt.output());
    Loss l{LossKind::kLogProb};
    l.scale = -1.0;
    const nn::LossEval le = nn::EvaluateLoss(l, dt.output());
    const Matrix d_fake = discriminator.Backward(dt, le.output_grad).input;
    const Vector grad = generator.Backward(gt, d_fake).params;
    generator = nn::Step(std::move(generator), grad, g_opt);
  }
  return {std::move(generator), std::move(discriminator)};
}

}  // namespace donas::gan
