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

#ifndef DONAS_EXPERIMENTS_H_
#define DONAS_EXPERIMENTS_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "donas/at_oracles.h"
#include "donas/checkpoint.h"
#include "donas/config.h"
#include "donas/datasets.h"
#include "donas/double_oracle.h"
#include "donas/gan_oracles.h"
#include "donas/metrics.h"

namespace donas {

struct RunHooks {
  // Called after every epoch with the full persistent state.
  std::function<void(const RunState&)> on_epoch;
  // Continue from this state instead of initializing.
  std::optional<RunState> resume_from;
  // Stop (without terminating) once this epoch is reached; < 0 disables.
  int stop_after_epoch = -1;
  // Observes every attacker-oracle hop in AT mode.
  at::HopObserver hop_observer;
};

DoConfig MakeDoConfig(const ExperimentConfig& cfg);

struct MatrixDemoResult {
  DoState<int, int> state;
  double full_game_value = 0.0;
};

MatrixDemoResult RunMatrixDemo(const ExperimentConfig& cfg, const RunHooks& hooks = {});

struct GanResult {
  DoState<nn::Network, nn::Network> state;
  gan::MixtureSample samples;
  Matrix reference;  // held-out real samples
  double frechet = 0.0;
  metrics::ModeCoverageResult coverage;
  int64_t generator_steps = 0;
  bool has_baseline = false;
  Matrix baseline_samples;
  double baseline_frechet = 0.0;
  metrics::ModeCoverageResult baseline_coverage;
  metrics::CkaReport cka;
};

// Generator gradient steps spent by a run with this trace; the baseline gets
// the same number.
int64_t GanGeneratorSteps(const ExperimentConfig& cfg, const std::vector<EpochRecord>& trace);

GanResult RunGan(const ExperimentConfig& cfg, const RunHooks& hooks = {});

struct AtAttackRow {
  std::string attack;
  double epsilon = 0.0;
  int iterations = 0;
  std::string model;
  double accuracy = 0.0;
};

struct AtResult {
  DoState<at::Perturbation, nn::Network> state;
  LabeledData train;
  LabeledData test;
  int64_t classifier_steps = 0;
  std::vector<AtAttackRow> robust;
  bool has_baseline = false;
  metrics::CkaReport cka;
};

LabeledData MoonsTrain(const ExperimentConfig& cfg);
LabeledData MoonsTest(const ExperimentConfig& cfg);
int64_t AtClassifierSteps(const ExperimentConfig& cfg, const std::vector<EpochRecord>& trace);
double RobustAccuracy(const AtResult& r, const std::string& attack, const std::string& model);

AtResult RunAt(const ExperimentConfig& cfg, const RunHooks& hooks = {});

struct RunOptions {
  std::string out_dir = "out";
  bool resume = false;
  int stop_after_epoch = -1;
};

enum class RunStatus { kOk, kConfigError, kNumericError, kOtherError };

struct RunOutcome {
  RunStatus status = RunStatus::kOk;
  std::string reason;
};

// Runs cfg.mode end to end and writes trace.csv, metrics.csv, samples.csv,
// cka_*.csv, checkpoints/epoch_NNN.ckpt and manifest.txt into out_dir. The
// manifest is written even on failure.
RunOutcome RunExperiment(const ExperimentConfig& cfg, const RunOptions& options);

// Manifest for a run that could not start (e.g. an invalid config).
void WriteFailureManifest(const std::string& out_dir, const std::string& reason);

std::string TraceCsv(const std::vector<EpochRecord>& trace);

}  // namespace donas

#endif  // DONAS_EXPERIMENTS_H_
