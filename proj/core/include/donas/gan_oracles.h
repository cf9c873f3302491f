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

#ifndef DONAS_GAN_ORACLES_H_
#define DONAS_GAN_ORACLES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "donas/diffnet.h"
#include "donas/metagame.h"
#include "donas/supernet.h"

namespace donas::gan {

// Fixed real samples and latent draws used for every meta-game entry of a
// run, so U stays consistent across epochs.
struct GanEvalSet {
  Matrix real;
  Matrix latent;
};

// Row (generator) payoff: the discriminator's loss
//   U = -(mean log D(x) + mean log(1 - D(G(z)))).
double GanPayoff(const nn::Network& generator, const nn::Network& discriminator,
                 const GanEvalSet& eval);

struct ObjectiveEval {
  double value = 0.0;
  Matrix grad;  // d value / d input rows
};

// Generator objective against a discriminator mixture, evaluated on fake
// samples x_i = G(z_i):
//   J = (1/m) sum_i sum_j sigma_j log(1 - D_j(x_i)).
// Discriminators with sigma_j = 0 are skipped.
ObjectiveEval MixedGeneratorObjective(const Matrix& fake,
                                      const std::vector<nn::Network>& discriminators,
                                      const MixedStrategy& sigma_d);

// Discriminator objective against a generator mixture:
//   (1/m) sum_i [log D(x_i) + sum_j sigma_j log(1 - D(G_j(z_i)))].
double MixedDiscriminatorObjective(const nn::Network& discriminator,
                                   const Matrix& real, const Matrix& latent,
                                   const std::vector<nn::Network>& generators,
                                   const MixedStrategy& sigma_g);

struct GanOracleConfig {
  nas::SupernetSpec generator_space;
  nas::SupernetSpec discriminator_space;
  int steps = 200;  // alternating architecture/weight steps
  int batch = 64;   // m; each step draws 2m samples
  int top_k = 4;
  double arch_lr = 3e-3;
  double weight_lr = 1e-2;
  int selection_batch = 256;
};

// Searches a fresh generator supernet against (D_pool, sigma_d): per step one
// architecture descent step on the first m latents and one weight descent
// step on the last m, then keeps the top-k architecture with the lowest
// mixed generator objective on a fixed selection batch.
nn::Network GeneratorOracle(const GanOracleConfig& config,
                            const std::vector<nn::Network>& discriminators,
                            const MixedStrategy& sigma_d, uint64_t seed);

// Mirror of GeneratorOracle with ascent on the mixed discriminator objective;
// real samples are drawn from `data`.
nn::Network DiscriminatorOracle(const GanOracleConfig& config,
                                const std::vector<nn::Network>& generators,
                                const MixedStrategy& sigma_g,
                                const Matrix& data, uint64_t seed);

// n / sum(1 / v_i) with each v_i floored at 1e-8; 1 for an empty list.
double HarmonicMean(std::span<const double> values);

// Phi(z) = HM(1 - D(G_j(z)) for j < index), one entry per latent row.
Vector HarmonicWeights(const std::vector<nn::Network>& generators, int index,
                       const nn::Network& discriminator, const Matrix& latent);

// Theta_j(z) = prod_{k < index, sigma_g[k] > 0} sigma_g[k] (1 - D_j(G_k(z))).
// Predecessors with zero probability are skipped rather than zeroing the
// product.
Vector NashTheta(const std::vector<nn::Network>& generators, int index,
                 const nn::Network& discriminator, const MixedStrategy& sigma_g,
                 const Matrix& latent);

// Weighted non-saturating generator objective mean_i w_i D(G(z_i)) and its
// gradient with respect to the generator parameters. The weights are
// treated as constants.
struct ParamObjective {
  double value = 0.0;
  Vector grad;
};
ParamObjective WeightedFoolingObjective(const nn::Network& generator,
                                        const nn::Network& discriminator,
                                        const Matrix& latent,
                                        const Vector& weights);

struct FinetuneConfig {
  int rounds = 20;
  int steps_per_round = 10;
  int batch = 64;
  double generator_lr = 1e-3;
  double discriminator_lr = 1e-3;
};

// Sequential harmonic-mean finetuning of K generators against one
// discriminator. Each round: every generator i ascends E[D(G_i(z)) Phi(z)],
// then the discriminator ascends E[log D(x)] + sum_k E[log(1 - D(G_k(z)))].
void FinetuneHarmonic(std::vector<nn::Network>& generators,
                      nn::Network& discriminator, const FinetuneConfig& config,
                      const Matrix& data, uint64_t seed);

// Sequential Nash finetuning. Generator i ascends
// E[sum_j sigma_d[j] D_j(G_i(z)) Theta_j(z)], each discriminator ascends its
// objective over all K generators, and after every round the meta-game is
// re-evaluated on `eval` and re-solved. Returns the refreshed equilibrium.
SolveResult FinetuneNash(std::vector<nn::Network>& generators,
                         std::vector<nn::Network>& discriminators,
                         MixedStrategy sigma_g, MixedStrategy sigma_d,
                         const FinetuneConfig& config, const Matrix& data,
                         const GanEvalSet& eval, uint64_t seed);

// Full pairwise meta-game on the fixed evaluation set.
PayoffMatrix GanMetaGame(const std::vector<nn::Network>& generators,
                         const std::vector<nn::Network>& discriminators,
                         const GanEvalSet& eval);

struct MixtureSample {
  Matrix samples;
  std::vector<int> generator_index;
};

// Draws a generator index from sigma_g for every sample, then z ~ N(0, I).
MixtureSample SampleMixture(const std::vector<nn::Network>& generators,
                            const MixedStrategy& sigma_g, int n, uint64_t seed);

// Single generator/discriminator pair trained by alternating steps, with the
// usual -log D(G(z)) generator loss. Used as the comparison baseline.
struct VanillaGanResult {
  nn::Network generator;
  nn::Network discriminator;
};
VanillaGanResult TrainVanillaGan(nn::Network generator, nn::Network discriminator,
                                 int steps, int batch, double lr,
                                 const Matrix& data, uint64_t seed);

}  // namespace donas::gan

#endif  // DONAS_GAN_ORACLES_H_
