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

#include "donas/cli.h"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "donas/config.h"
#include "donas/experiments.h"
#include "donas/version.h"

namespace donas {

int RunCli(const std::vector<std::string>& args) {
  CLI::App app{"Double-oracle neural architecture search experiments", "donas"};
  app.set_version_flag("--version", std::string(VersionString()));
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir = "out";
  std::optional<std::string> mode;
  bool resume = false;
  int stop_after = -1;
  run->add_option("--config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--mode", mode, "Override the config mode")
      ->check(CLI::IsMember({"gan", "at", "matrix-demo"}));
  run->add_flag("--resume", resume, "Continue from the latest checkpoint in --out");
  run->add_option("--stop-after", stop_after, "Stop after this epoch (for resume tests)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  ExperimentConfig cfg;
  try {
    cfg = LoadConfig(config_path);
    if (seed) cfg.seed = *seed;
    if (mode) cfg.mode = *mode;
    cfg.Validate();
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    WriteFailureManifest(out_dir, std::string("invalid config: ") + e.what());
    return kExitInvalidConfig;
  }

  RunOptions options;
  options.out_dir = out_dir;
  options.resume = resume;
  options.stop_after_epoch = stop_after;
  const RunOutcome outcome = RunExperiment(cfg, options);
  switch (outcome.status) {
    case RunStatus::kOk:
      std::cout << "run complete: " << out_dir << '\n';
      return kExitOk;
    case RunStatus::kConfigError:
      std::cerr << "invalid config: " << outcome.reason << '\n';
      return kExitInvalidConfig;
    case RunStatus::kNumericError:
      std::cerr << "numeric failure: " << outcome.reason << '\n';
      return kExitNumeric;
    case RunStatus::kOtherError:
      break;
  }
  std::cerr << "run failed: " << outcome.reason << '\n';
  return kExitFailure;
}

}  // namespace donas
