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

#include "donas/experiments.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "donas/gan_oracles.h"
#include "donas/serialize.h"
#include "donas/version.h"

namespace donas {
namespace {

namespace fs = std::filesystem;
using io::FormatDouble;

RunState Persist(const ExperimentConfig& cfg, RunState s) {
  s.mode = cfg.mode;
  s.seed = cfg.seed;
  s.config_text = cfg.ToText();
  return s;
}

template <typename R, typename C>
DoState<R, C> StartOrResume(const ExperimentConfig& cfg, const RunHooks& hooks,
                            const std::function<DoState<R, C>()>& init) {
  if (!hooks.resume_from) return init();
  const RunState& saved = *hooks.resume_from;
  if (saved.mode != cfg.mode || saved.seed != cfg.seed || saved.config_text != cfg.ToText()) {
    throw InputError("checkpoint was written by a different configuration (mode '" +
                     saved.mode + "', seed " + std::to_string(saved.seed) + ")");
  }
  return ToDoState<R, C>(saved);
}

template <typename R, typename C>
void Drive(const DoubleOracle<R, C>& loop, DoState<R, C>& state, const ExperimentConfig& cfg,
           const RunHooks& hooks) {
  while (!state.terminated && state.epoch < loop.config().max_epochs) {
    if (hooks.stop_after_epoch >= 0 && state.epoch >= hooks.stop_after_epoch) break;
    loop.Step(state);
    if (hooks.on_epoch) hooks.on_epoch(Persist(cfg, ToRunState(state)));
  }
}

int ArgBest(const Vector& v, bool maximize) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (maximize ? v[i] > v[best] : v[i] < v[best]) best = i;
  return best;
}

std::vector<nn::LayerSpec> HiddenSpecs(const std::vector<int>& widths, nn::Activation act,
                                       nn::LayerSpec head) {
  std::vector<nn::LayerSpec> specs;
  for (int w : widths) specs.push_back({w, act});
  specs.push_back(head);
  return specs;
}

// The network that uses the first affine candidate in every cell.
nn::Network FirstAffine(const nas::Supernet& net) {
  nas::ArchChoice choice;
  for (const nas::Cell& cell : net.cells()) {
    int pick = 0;
    while (cell.ops[pick].kind != nas::OpKind::kAffine) ++pick;
    choice.ops.push_back(pick);
  }
  return net.Extract(choice);
}

}  // namespace

DoConfig MakeDoConfig(const ExperimentConfig& cfg) {
  DoConfig c;
  c.epsilon_term = cfg.epsilon_term;
  c.support_limit = cfg.support_limit;
  c.max_epochs = cfg.max_epochs;
  c.seed = cfg.seed;
  c.prune = cfg.prune;
  return c;
}

// ---------------------------------------------------------------------------
// matrix-demo

MatrixDemoResult RunMatrixDemo(const ExperimentConfig& cfg, const RunHooks& hooks) {
  const PayoffMatrix full(ParseMatrix(cfg.matrix));
  auto row_oracle = [&](const std::vector<int>& cols, const MixedStrategy& s,
                        const OracleContext&) {
    Vector v = Vector::Zero(full.rows());
    for (int j = 0; j < s.size(); ++j) v += s[j] * full.entries().col(cols[j]);
    return ArgBest(v, true);
  };
  auto col_oracle = [&](const std::vector<int>& rows, const MixedStrategy& s,
                        const OracleContext&) {
    Vector v = Vector::Zero(full.cols());
    for (int i = 0; i < s.size(); ++i) v += s[i] * full.entries().row(rows[i]).transpose();
    return ArgBest(v, false);
  };
  auto payoff = [&](int i, int j) { return full(i, j); };
  DoubleOracle<int, int> loop(row_oracle, col_oracle, payoff, MakeDoConfig(cfg));
  MatrixDemoResult out;
  out.state = StartOrResume<int, int>(cfg, hooks, [&] { return loop.Initialize(0, 0); });
  Drive(loop, out.state, cfg, hooks);
  out.full_game_value = SolveZeroSum(full).game_value;
  return out;
}

// ---------------------------------------------------------------------------
// gan

namespace {

gan::GanOracleConfig GanOracles(const ExperimentConfig& cfg) {
  gan::GanOracleConfig o;
  o.generator_space.input_dim = cfg.latent_dim;
  o.generator_space.cell_widths = cfg.gen_widths;
  o.generator_space.head = nn::LayerSpec{2, nn::Activation::kIdentity};
  o.discriminator_space.input_dim = 2;
  o.discriminator_space.cell_widths = cfg.disc_widths;
  o.discriminator_space.head = nn::LayerSpec{1, nn::Activation::kSigmoid};
  o.steps = cfg.oracle_steps;
  o.batch = cfg.oracle_batch;
  o.top_k = cfg.top_k;
  o.arch_lr = cfg.arch_lr;
  o.weight_lr = cfg.weight_lr;
  o.selection_batch = cfg.selection_batch;
  return o;
}

gan::FinetuneConfig GanFinetune(const ExperimentConfig& cfg) {
  gan::FinetuneConfig f;
  f.rounds = cfg.finetune_rounds;
  f.steps_per_round = cfg.finetune_steps;
  f.batch = cfg.finetune_batch;
  f.generator_lr = cfg.gen_lr;
  f.discriminator_lr = cfg.disc_lr;
  return f;
}

}  // namespace

int64_t GanGeneratorSteps(const ExperimentConfig& cfg, const std::vector<EpochRecord>& trace) {
  const int64_t ft = cfg.finetune == "none"
                         ? 0
                         : static_cast<int64_t>(cfg.finetune_rounds) * cfg.finetune_steps;
  int64_t steps = static_cast<int64_t>(cfg.init_finetune_rounds) * cfg.finetune_steps;
  for (const EpochRecord& e : trace) {
    steps += 2 * static_cast<int64_t>(cfg.oracle_steps);
    steps += ft * (e.row_pool + e.pruned_rows);
  }
  return steps;
}

GanResult RunGan(const ExperimentConfig& cfg, const RunHooks& hooks) {
  using Nets = std::vector<nn::Network>;
  const Matrix data = GenRing(cfg.data_n, cfg.ring_modes, cfg.ring_radius, cfg.ring_sigma,
                              DeriveSeed(cfg.seed, "dataset"));
  gan::GanEvalSet eval;
  eval.real = GenRing(cfg.eval_n, cfg.ring_modes, cfg.ring_radius, cfg.ring_sigma,
                      DeriveSeed(cfg.seed, "eval-real"));
  eval.latent = Rng(DeriveSeed(cfg.seed, "eval-latent")).NormalMatrix(cfg.eval_n, cfg.latent_dim);
  const gan::GanOracleConfig oracles = GanOracles(cfg);
  const gan::FinetuneConfig ft = GanFinetune(cfg);

  auto row_oracle = [&](const Nets& ds, const MixedStrategy& s, const OracleContext& ctx) {
    return gan::GeneratorOracle(oracles, ds, s, ctx.seed);
  };
  auto col_oracle = [&](const Nets& gs, const MixedStrategy& s, const OracleContext& ctx) {
    return gan::DiscriminatorOracle(oracles, gs, s, data, ctx.seed);
  };
  auto payoff = [&](const nn::Network& g, const nn::Network& d) {
    return gan::GanPayoff(g, d, eval);
  };
  DoubleOracle<nn::Network, nn::Network> loop(row_oracle, col_oracle, payoff, MakeDoConfig(cfg));

  GanResult out;
  const DoState<nn::Network, nn::Network>* current = &out.state;
  if (cfg.finetune == "hm") {
    loop.set_finetune_hook([&](Nets& gs, Nets& ds, const OracleContext& ctx) {
      Eigen::Index dominant = static_cast<Eigen::Index>(ds.size()) - 1;
      if (cfg.hm_discriminator == "dominant") current->col_strategy.probs().maxCoeff(&dominant);
      nn::Network& d = ds[static_cast<size_t>(dominant)];
      gan::FinetuneHarmonic(gs, d, ft, data, ctx.seed);
      return true;
    });
  } else if (cfg.finetune == "nash") {
    loop.set_finetune_hook([&](Nets& gs, Nets& ds, const OracleContext& ctx) {
      gan::FinetuneNash(gs, ds, current->row_strategy.Padded(static_cast<int>(gs.size())),
                        current->col_strategy.Padded(static_cast<int>(ds.size())), ft, data,
                        eval, ctx.seed);
      return true;
    });
  }

  out.state = StartOrResume<nn::Network, nn::Network>(cfg, hooks, [&] {
    Rng init(DeriveSeed(cfg.seed, "init"));
    Nets gens = {FirstAffine(nas::Supernet::Random(oracles.generator_space, init))};
    nn::Network d0 = FirstAffine(nas::Supernet::Random(oracles.discriminator_space, init));
    gan::FinetuneConfig init_ft = ft;
    init_ft.rounds = cfg.init_finetune_rounds;
    init_ft.generator_lr = cfg.init_lr;
    init_ft.discriminator_lr = cfg.init_lr;
    gan::FinetuneHarmonic(gens, d0, init_ft, data, DeriveSeed(cfg.seed, "init-finetune"));
    return loop.Initialize(std::move(gens.front()), std::move(d0));
  });
  Drive(loop, out.state, cfg, hooks);

  const Nets& gens = out.state.row_pool;
  out.samples = gan::SampleMixture(gens, out.state.row_strategy, cfg.sample_n,
                                   DeriveSeed(cfg.seed, "eval-samples"));
  out.reference = GenRing(cfg.sample_n, cfg.ring_modes, cfg.ring_radius, cfg.ring_sigma,
                          DeriveSeed(cfg.seed, "eval-reference"));
  const Matrix centers = RingCenters(cfg.ring_modes, cfg.ring_radius);
  out.frechet = metrics::Frechet2d(out.samples.samples, out.reference);
  out.coverage = metrics::ModeCoverageDetail(out.samples.samples, centers, cfg.ring_sigma,
                                             cfg.coverage_min_frac);
  out.generator_steps = GanGeneratorSteps(cfg, out.state.trace);

  const Matrix probe =
      Rng(DeriveSeed(cfg.seed, "cka-probe")).NormalMatrix(cfg.cka_probe_n, cfg.latent_dim);
  out.cka = metrics::CkaHeatmap(gens, probe);

  if (cfg.baseline) {
    Rng init(DeriveSeed(cfg.seed, "baseline-init"));
    nn::Network g = nn::Network::Random(
        cfg.latent_dim,
        HiddenSpecs(cfg.gen_widths, nn::Activation::kTanh, {2, nn::Activation::kIdentity}), init);
    nn::Network d = nn::Network::Random(
        2, HiddenSpecs(cfg.disc_widths, nn::Activation::kTanh, {1, nn::Activation::kSigmoid}),
        init);
    const gan::VanillaGanResult trained =
        gan::TrainVanillaGan(std::move(g), std::move(d), static_cast<int>(out.generator_steps),
                             cfg.finetune_batch, cfg.init_lr, data,
                             DeriveSeed(cfg.seed, "baseline"));
    out.baseline_samples = trained.generator.Forward(
        Rng(DeriveSeed(cfg.seed, "eval-samples")).NormalMatrix(cfg.sample_n, cfg.latent_dim));
    out.baseline_frechet = metrics::Frechet2d(out.baseline_samples, out.reference);
    out.baseline_coverage = metrics::ModeCoverageDetail(out.baseline_samples, centers,
                                                        cfg.ring_sigma, cfg.coverage_min_frac);
    out.has_baseline = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// at

namespace {

LabeledData Moons(const ExperimentConfig& cfg) {
  LabeledData all = GenTwoMoons(cfg.moons_n, cfg.moons_noise, DeriveSeed(cfg.seed, "dataset"));
  all.x = FitMinMax(all.x).Apply(all.x);
  return all;
}

at::ClassifierOracleConfig ClassifierConfig(const ExperimentConfig& cfg) {
  at::ClassifierOracleConfig c;
  c.space.input_dim = 2;
  c.space.cell_widths = cfg.classifier_widths;
  c.space.head = nn::LayerSpec{2, nn::Activation::kIdentity};
  c.iterations = cfg.classifier_iterations;
  c.batch = cfg.classifier_batch;
  c.weight_lr = cfg.classifier_weight_lr;
  c.arch_lr = cfg.classifier_arch_lr;
  c.gamma_reg = cfg.gamma_reg;
  c.warmup = cfg.warmup;
  c.curvature_h = cfg.curvature_h;
  return c;
}

at::FinetuneConfig AtFinetune(const ExperimentConfig& cfg) {
  at::FinetuneConfig f;
  f.hops = cfg.hops;
  f.epochs = cfg.at_finetune_epochs;
  f.batch = cfg.classifier_batch;
  f.learning_rate = cfg.at_finetune_lr;
  return f;
}

std::vector<std::pair<std::string, at::AttackConfig>> Attacks(double eps) {
  return {{"clean", at::AttackConfig::Fgsm(0.0)},
          {"fgsm", at::AttackConfig::Fgsm(eps)},
          {"pgd20", at::AttackConfig::Pgd(eps, 20)},
          {"pgd100", at::AttackConfig::Pgd(eps, 100)}};
}

}  // namespace

LabeledData MoonsTrain(const ExperimentConfig& cfg) {
  const LabeledData all = Moons(cfg);
  return Slice(all, 0, all.size() / 2);
}

LabeledData MoonsTest(const ExperimentConfig& cfg) {
  const LabeledData all = Moons(cfg);
  return Slice(all, all.size() / 2, all.size());
}

int64_t AtClassifierSteps(const ExperimentConfig& cfg, const std::vector<EpochRecord>& trace) {
  const int64_t n_train = cfg.moons_n / 2;
  const int64_t batches = (n_train + cfg.classifier_batch - 1) / cfg.classifier_batch;
  const int64_t ft = static_cast<int64_t>(cfg.at_finetune_epochs) * batches * cfg.hops;
  return cfg.classifier_iterations +
         static_cast<int64_t>(trace.size()) * (cfg.classifier_iterations + ft);
}

double RobustAccuracy(const AtResult& r, const std::string& attack, const std::string& model) {
  for (const AtAttackRow& row : r.robust)
    if (row.attack == attack && row.model == model) return row.accuracy;
  throw ContractError("no robust accuracy for " + attack + "/" + model);
}

AtResult RunAt(const ExperimentConfig& cfg, const RunHooks& hooks) {
  using Nets = std::vector<nn::Network>;
  using Perts = std::vector<at::Perturbation>;
  AtResult out;
  out.train = MoonsTrain(cfg);
  out.test = MoonsTest(cfg);
  const LabeledData& train = out.train;
  const at::ClassifierOracleConfig ccfg = ClassifierConfig(cfg);
  const at::AttackerOracleConfig acfg{cfg.epsilon_atk, cfg.hops, cfg.attacker_epochs,
                                      cfg.attacker_batch};
  const at::FinetuneConfig ft = AtFinetune(cfg);

  auto row_oracle = [&](const Nets& cs, const MixedStrategy& s, const OracleContext& ctx) {
    return at::AttackerOracle(acfg, cs, s, train, ctx.seed, hooks.hop_observer);
  };
  auto col_oracle = [&](const Perts& as, const MixedStrategy& s, const OracleContext& ctx) {
    return at::ClassifierOracle(ccfg, as, s, train, ctx.seed);
  };
  auto payoff = [&](const at::Perturbation& p, const nn::Network& c) {
    return at::AtPayoff(c, p, train);
  };
  DoubleOracle<at::Perturbation, nn::Network> loop(row_oracle, col_oracle, payoff,
                                                   MakeDoConfig(cfg));
  const DoState<at::Perturbation, nn::Network>* current = &out.state;
  if (cfg.at_finetune_epochs > 0) {
    loop.set_finetune_hook([&](Perts& as, Nets& cs, const OracleContext& ctx) {
      cs.back() = at::FinetuneClassifier(
          std::move(cs.back()), as,
          current->row_strategy.Padded(static_cast<int>(as.size())), train, ft, ctx.seed);
      return true;
    });
  }

  out.state = StartOrResume<at::Perturbation, nn::Network>(cfg, hooks, [&] {
    const int dim = static_cast<int>(train.x.cols());
    at::Perturbation zero = at::Perturbation::Zero(train.size(), dim, cfg.epsilon_atk);
    nn::Network c0 = at::ClassifierOracle(ccfg, {zero}, MixedStrategy::Pure(1, 0), train,
                                          DeriveSeed(cfg.seed, "init-c"));
    return loop.Initialize(std::move(zero), std::move(c0));
  });
  Drive(loop, out.state, cfg, hooks);
  out.classifier_steps = AtClassifierSteps(cfg, out.state.trace);

  const uint64_t eval_seed = DeriveSeed(cfg.seed, "eval-attack");
  for (const auto& [name, attack] : Attacks(cfg.epsilon_atk)) {
    out.robust.push_back({name, attack.epsilon, attack.iterations, "donas",
                          at::EvaluateRobust(out.state.col_pool, out.state.col_strategy,
                                             out.test, attack, eval_seed)});
  }
  const int probe_n = std::min(cfg.cka_probe_n, out.test.size());
  out.cka = metrics::CkaHeatmap(out.state.col_pool, out.test.x.topRows(probe_n));

  if (cfg.baseline) {
    Rng init(DeriveSeed(cfg.seed, "baseline-init"));
    nn::Network net = nn::Network::Random(
        2, HiddenSpecs(cfg.classifier_widths, nn::Activation::kRelu,
                       {2, nn::Activation::kIdentity}),
        init);
    net = at::TrainStandard(std::move(net), train, static_cast<int>(out.classifier_steps),
                            cfg.classifier_batch, cfg.baseline_lr,
                            DeriveSeed(cfg.seed, "baseline"));
    for (const auto& [name, attack] : Attacks(cfg.epsilon_atk)) {
      out.robust.push_back({name, attack.epsilon, attack.iterations, "standard",
                            at::EvaluateRobust(net, out.test, attack, eval_seed)});
    }
    out.has_baseline = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// artifacts

std::string TraceCsv(const std::vector<EpochRecord>& trace) {
  std::ostringstream os;
  os << "epoch,game_value,row_gain,col_gain,row_pool,col_pool,pruned_rows,pruned_cols,"
        "terminated\n";
  for (const EpochRecord& e : trace) {
    os << e.epoch << ',' << FormatDouble(e.game_value) << ',' << FormatDouble(e.row_gain) << ','
       << FormatDouble(e.col_gain) << ',' << e.row_pool << ',' << e.col_pool << ','
       << e.pruned_rows << ',' << e.pruned_cols << ',' << (e.terminated ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

std::string GridCsv(const Matrix& g) {
  std::ostringstream os;
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) os << (j ? "," : "") << FormatDouble(g(i, j));
    os << '\n';
  }
  return os.str();
}

class MetricsCsv {
 public:
  MetricsCsv() { os_ << "metric,model,value\n"; }
  void Add(std::string_view metric, std::string_view model, double v) {
    os_ << metric << ',' << model << ',' << FormatDouble(v) << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

std::string StrategyCsv(const MixedStrategy& row, const MixedStrategy& col) {
  std::ostringstream os;
  os << "player,index,probability\n";
  for (int i = 0; i < row.size(); ++i) os << "row," << i << ',' << FormatDouble(row[i]) << '\n';
  for (int j = 0; j < col.size(); ++j) os << "col," << j << ',' << FormatDouble(col[j]) << '\n';
  return os.str();
}

std::vector<std::string> WriteCka(const fs::path& dir, const metrics::CkaReport& cka) {
  std::vector<std::string> files;
  for (size_t i = 0; i < cka.within.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "cka_within_%02zu.csv", i);
    WriteFile(dir / name, GridCsv(cka.within[i]));
    files.push_back(name);
  }
  WriteFile(dir / "cka_cross.csv", GridCsv(cka.cross_mean));
  files.push_back("cka_cross.csv");
  return files;
}

std::string CheckpointName(int epoch) {
  char name[32];
  std::snprintf(name, sizeof(name), "epoch_%03d.ckpt", epoch);
  return name;
}

std::optional<fs::path> LatestCheckpoint(const fs::path& dir) {
  if (!fs::exists(dir)) return std::nullopt;
  std::optional<fs::path> best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("epoch_", 0) != 0 || entry.path().extension() != ".ckpt") continue;
    if (!best || name > best->filename().string()) best = entry.path();
  }
  return best;
}

struct Manifest {
  std::string status = "ok";
  std::string reason;
  std::string mode;
  std::string seed;
  double wall_time_s = 0.0;
  std::vector<std::string> files;
  std::string config_text;
};

void WriteManifest(const fs::path& dir, const Manifest& m) {
  std::ostringstream os;
  os << "status = " << m.status << '\n';
  if (!m.reason.empty()) os << "reason = " << m.reason << '\n';
  os << "version = " << VersionString() << '\n';
  if (!m.mode.empty()) os << "mode = " << m.mode << '\n';
  if (!m.seed.empty()) os << "seed = " << m.seed << '\n';
  os << "wall_time_s = " << FormatDouble(m.wall_time_s) << '\n';
  os << "files =";
  for (const std::string& f : m.files) os << ' ' << f;
  os << '\n';
  if (!m.config_text.empty()) os << "\n[config]\n" << m.config_text;
  WriteFile(dir / "manifest.txt", os.str());
}

}  // namespace

void WriteFailureManifest(const std::string& out_dir, const std::string& reason) {
  fs::create_directories(out_dir);
  Manifest m;
  m.status = "failed";
  m.reason = reason;
  WriteManifest(out_dir, m);
}

RunOutcome RunExperiment(const ExperimentConfig& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(options.out_dir);
  Manifest manifest;
  manifest.mode = cfg.mode;
  manifest.seed = std::to_string(cfg.seed);
  manifest.config_text = cfg.ToText();
  RunOutcome outcome;
  try {
    fs::create_directories(dir);
    cfg.Validate();
    const fs::path ckpt_dir = dir / "checkpoints";
    RunHooks hooks;
    hooks.stop_after_epoch = options.stop_after_epoch;
    if (options.resume) {
      const std::optional<fs::path> latest = LatestCheckpoint(ckpt_dir);
      if (!latest) throw InputError("--resume: no checkpoint in '" + ckpt_dir.string() + "'");
      hooks.resume_from = LoadCheckpoint(latest->string());
    }
    if (cfg.checkpoints) {
      fs::create_directories(ckpt_dir);
      hooks.on_epoch = [&](const RunState& s) {
        SaveCheckpoint(s, (ckpt_dir / CheckpointName(s.epoch)).string());
      };
    }

    std::vector<std::string>& files = manifest.files;
    MetricsCsv metrics_csv;
    std::vector<EpochRecord> trace;
    MixedStrategy row, col;
    if (cfg.mode == "matrix-demo") {
      const MatrixDemoResult r = RunMatrixDemo(cfg, hooks);
      trace = r.state.trace;
      row = r.state.row_strategy;
      col = r.state.col_strategy;
      const double value = trace.empty() ? r.state.payoff(0, 0) : trace.back().game_value;
      metrics_csv.Add("restricted_game_value", "do", value);
      metrics_csv.Add("full_game_value", "lp", r.full_game_value);
      metrics_csv.Add("epochs", "do", r.state.epoch);
    } else if (cfg.mode == "gan") {
      const GanResult r = RunGan(cfg, hooks);
      trace = r.state.trace;
      row = r.state.row_strategy;
      col = r.state.col_strategy;
      metrics_csv.Add("mode_coverage", "donas", r.coverage.covered);
      metrics_csv.Add("high_quality_frac", "donas",
                      static_cast<double>(r.coverage.high_quality) / cfg.sample_n);
      metrics_csv.Add("frechet_2d", "donas", r.frechet);
      metrics_csv.Add("generator_steps", "donas", static_cast<double>(r.generator_steps));
      if (r.has_baseline) {
        metrics_csv.Add("mode_coverage", "baseline", r.baseline_coverage.covered);
        metrics_csv.Add("high_quality_frac", "baseline",
                        static_cast<double>(r.baseline_coverage.high_quality) / cfg.sample_n);
        metrics_csv.Add("frechet_2d", "baseline", r.baseline_frechet);
        metrics_csv.Add("generator_steps", "baseline", static_cast<double>(r.generator_steps));
      }
      std::ostringstream samples;
      samples << "x,y,generator_index\n";
      for (int i = 0; i < r.samples.samples.rows(); ++i) {
        samples << FormatDouble(r.samples.samples(i, 0)) << ','
                << FormatDouble(r.samples.samples(i, 1)) << ',' << r.samples.generator_index[i]
                << '\n';
      }
      WriteFile(dir / "samples.csv", samples.str());
      files.push_back("samples.csv");
      for (const std::string& f : WriteCka(dir, r.cka)) files.push_back(f);
    } else {
      const AtResult r = RunAt(cfg, hooks);
      trace = r.state.trace;
      row = r.state.row_strategy;
      col = r.state.col_strategy;
      std::ostringstream robust;
      robust << "attack,epsilon,iterations,model,accuracy\n";
      for (const AtAttackRow& a : r.robust) {
        robust << a.attack << ',' << FormatDouble(a.epsilon) << ',' << a.iterations << ','
               << a.model << ',' << FormatDouble(a.accuracy) << '\n';
        metrics_csv.Add("accuracy_" + a.attack, a.model, a.accuracy);
      }
      metrics_csv.Add("classifier_steps", "donas", static_cast<double>(r.classifier_steps));
      WriteFile(dir / "robust.csv", robust.str());
      files.push_back("robust.csv");
      std::ostringstream samples;
      samples << "x,y,label\n";
      for (int i = 0; i < r.test.size(); ++i) {
        samples << FormatDouble(r.test.x(i, 0)) << ',' << FormatDouble(r.test.x(i, 1)) << ','
                << r.test.labels[i] << '\n';
      }
      WriteFile(dir / "samples.csv", samples.str());
      files.push_back("samples.csv");
      for (const std::string& f : WriteCka(dir, r.cka)) files.push_back(f);
    }
    WriteFile(dir / "trace.csv", TraceCsv(trace));
    WriteFile(dir / "metrics.csv", metrics_csv.str());
    WriteFile(dir / "strategies.csv", StrategyCsv(row, col));
    files.insert(files.begin(), {"trace.csv", "metrics.csv", "strategies.csv"});
    if (cfg.checkpoints) files.push_back("checkpoints/");
  } catch (const ConfigError& e) {
    outcome = {RunStatus::kConfigError, e.what()};
  } catch (const NumericError& e) {
    outcome = {RunStatus::kNumericError, e.what()};
  } catch (const std::exception& e) {
    outcome = {RunStatus::kOtherError, e.what()};
  }
  if (outcome.status != RunStatus::kOk) {
    manifest.status = "failed";
    manifest.reason = outcome.reason;
  }
  manifest.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    fs::create_directories(dir);
    WriteManifest(dir, manifest);
  } catch (const std::exception& e) {
    if (outcome.status == RunStatus::kOk) outcome = {RunStatus::kOtherError, e.what()};
  }
  return outcome;
}

}  // namespace donas
