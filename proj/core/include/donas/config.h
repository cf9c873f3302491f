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

#ifndef DONAS_CONFIG_H_
#define DONAS_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "donas/common.h"

namespace donas {

// Invalid configuration; the message carries the line and key.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct ExperimentConfig {
  std::string mode = "matrix-demo";  // gan | at | matrix-demo
  uint64_t seed = 0;
  bool checkpoints = true;

  // Double oracle.
  double epsilon_term = 5e-3;
  int support_limit = 10;
  int max_epochs = 20;
  bool prune = true;

  // matrix-demo: rows separated by ';', entries by ','.
  std::string matrix = "0,-1,1; 1,0,-1; -1,1,0";

  // GAN: data and evaluation.
  int ring_modes = 8;
  double ring_radius = 2.0;
  double ring_sigma = 0.05;
  int data_n = 4000;
  int latent_dim = 2;
  int eval_n = 512;
  int sample_n = 2000;
  double coverage_min_frac = 0.02;
  int cka_probe_n = 512;

  // GAN: oracles and finetuning.
  std::vector<int> gen_widths = {16, 16};
  std::vector<int> disc_widths = {16, 16};
  int oracle_steps = 200;
  int oracle_batch = 64;
  int top_k = 4;
  double arch_lr = 3e-3;
  double weight_lr = 1e-2;
  int selection_batch = 256;
  std::string finetune = "nash";  // none | hm | nash
  std::string hm_discriminator = "newest";  // newest | dominant
  int init_finetune_rounds = 200;  // harmonic finetune of the initial pair
  int finetune_rounds = 10;
  int finetune_steps = 50;
  int finetune_batch = 64;
  // Initial pair and the single-generator baseline.
  double init_lr = 1e-3;
  double gen_lr = 1e-4;
  double disc_lr = 2e-3;
  bool baseline = true;

  // AT.
  int moons_n = 2000;
  double moons_noise = 0.1;
  double epsilon_atk = 0.1;
  int hops = 4;
  int attacker_epochs = 1;
  int attacker_batch = 64;
  std::vector<int> classifier_widths = {16, 16};
  int classifier_iterations = 1000;
  int classifier_batch = 64;
  double classifier_weight_lr = 1e-2;
  double classifier_arch_lr = 0.1;
  double gamma_reg = 0.01;
  int warmup = 50;
  double curvature_h = 0.05;
  int at_finetune_epochs = 1;
  double at_finetune_lr = 1e-2;
  double baseline_lr = 2e-3;  // standard-trained classifier

  // Throws ConfigError on values outside their documented ranges.
  void Validate() const;
  // key = value lines in a fixed order, parseable by ParseConfig.
  std::string ToText() const;
};

// Flat "key = value" text; '#' starts a comment. Unknown and duplicate keys
// and malformed values raise ConfigError naming the line and key.
ExperimentConfig ParseConfig(std::string_view text);
ExperimentConfig LoadConfig(const std::string& path);

// Parses "a,b; c,d" into a dense matrix.
Matrix ParseMatrix(std::string_view text);

}  // namespace donas

#endif  // DONAS_CONFIG_H_
