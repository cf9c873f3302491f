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

#include <benchmark/benchmark.h>

#include "donas/at_oracles.h"
#include "donas/diffnet.h"
#include "donas/metagame.h"
#include "donas/metrics.h"
#include "donas/rng.h"
#include "donas/supernet.h"

namespace donas {
namespace {

void BM_SolveZeroSum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  const PayoffMatrix u(rng.UniformMatrix(n, n, -1.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(SolveZeroSum(u).game_value);
}
BENCHMARK(BM_SolveZeroSum)->Arg(4)->Arg(10)->Arg(20);

nn::Network Mlp(Rng& rng) {
  return nn::Network::Random(2, {{32, nn::Activation::kTanh},
                                 {32, nn::Activation::kTanh},
                                 {2, nn::Activation::kIdentity}},
                             rng);
}

void BM_NetworkForward(benchmark::State& state) {
  Rng rng(2);
  const nn::Network net = Mlp(rng);
  const Matrix x = rng.NormalMatrix(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.Forward(x).data());
}
BENCHMARK(BM_NetworkForward)->Arg(64)->Arg(512);

void BM_NetworkGradParams(benchmark::State& state) {
  Rng rng(3);
  const nn::Network net = Mlp(rng);
  const int n = static_cast<int>(state.range(0));
  const Matrix x = rng.NormalMatrix(n, 2);
  nn::Loss loss{nn::LossKind::kCrossEntropy, std::vector<int>(n, 1), {}, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(nn::GradParams(net, x, loss).data());
}
BENCHMARK(BM_NetworkGradParams)->Arg(64)->Arg(512);

void BM_SupernetBackward(benchmark::State& state) {
  Rng rng(4);
  nas::SupernetSpec spec;
  spec.input_dim = 2;
  spec.cell_widths = {16, 16};
  spec.head = nn::LayerSpec{2, nn::Activation::kIdentity};
  const nas::Supernet net = nas::Supernet::Random(spec, rng);
  const Matrix x = rng.NormalMatrix(128, 2);
  const nn::Loss loss{nn::LossKind::kCrossEntropy, std::vector<int>(128, 0), {}, 1.0};
  for (auto _ : state) {
    const nas::SupernetTrace tr = net.Trace(x);
    benchmark::DoNotOptimize(
        net.Backward(tr, nn::EvaluateLoss(loss, tr.output).output_grad).arch.data());
  }
}
BENCHMARK(BM_SupernetBackward);

void BM_Pgd20(benchmark::State& state) {
  Rng rng(5);
  const nn::Network net = Mlp(rng);
  const Matrix x = rng.NormalMatrix(256, 2);
  const std::vector<int> labels(256, 1);
  for (auto _ : state) {
    Rng attack_rng(6);
    benchmark::DoNotOptimize(
        at::Pgd(net, x, labels, at::AttackConfig::Pgd(0.1, 20, true), attack_rng).data());
  }
}
BENCHMARK(BM_Pgd20);

void BM_LinearCka(benchmark::State& state) {
  Rng rng(7);
  const Matrix x = rng.NormalMatrix(1000, 32);
  const Matrix y = rng.NormalMatrix(1000, 32);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::LinearCka(x, y).value);
}
BENCHMARK(BM_LinearCka);

}  // namespace
}  // namespace donas

BENCHMARK_MAIN();
