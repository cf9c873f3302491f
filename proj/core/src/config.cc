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

#include "donas/config.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <variant>

namespace donas {
namespace {

using Field = std::variant<std::string ExperimentConfig::*, uint64_t ExperimentConfig::*,
                           bool ExperimentConfig::*, double ExperimentConfig::*,
                           int ExperimentConfig::*, std::vector<int> ExperimentConfig::*>;

struct Binding {
  const char* key;
  Field field;
};

// Order here is the order of ToText().
const std::vector<Binding>& Bindings() {
  using C = ExperimentConfig;
  static const std::vector<Binding> kBindings = {
      {"mode", &C::mode},
      {"seed", &C::seed},
      {"checkpoints", &C::checkpoints},
      {"epsilon_term", &C::epsilon_term},
      {"support_limit", &C::support_limit},
      {"max_epochs", &C::max_epochs},
      {"prune", &C::prune},
      {"matrix", &C::matrix},
      {"ring_modes", &C::ring_modes},
      {"ring_radius", &C::ring_radius},
      {"ring_sigma", &C::ring_sigma},
      {"data_n", &C::data_n},
      {"latent_dim", &C::latent_dim},
      {"eval_n", &C::eval_n},
      {"sample_n", &C::sample_n},
      {"coverage_min_frac", &C::coverage_min_frac},
      {"cka_probe_n", &C::cka_probe_n},
      {"gen_widths", &C::gen_widths},
      {"disc_widths", &C::disc_widths},
      {"oracle_steps", &C::oracle_steps},
      {"oracle_batch", &C::oracle_batch},
      {"top_k", &C::top_k},
      {"arch_lr", &C::arch_lr},
      {"weight_lr", &C::weight_lr},
      {"selection_batch", &C::selection_batch},
      {"finetune", &C::finetune},
      {"hm_discriminator", &C::hm_discriminator},
      {"init_finetune_rounds", &C::init_finetune_rounds},
      {"finetune_rounds", &C::finetune_rounds},
      {"finetune_steps", &C::finetune_steps},
      {"finetune_batch", &C::finetune_batch},
      {"init_lr", &C::init_lr},
      {"gen_lr", &C::gen_lr},
      {"disc_lr", &C::disc_lr},
      {"baseline", &C::baseline},
      {"moons_n", &C::moons_n},
      {"moons_noise", &C::moons_noise},
      {"epsilon_atk", &C::epsilon_atk},
      {"hops", &C::hops},
      {"attacker_epochs", &C::attacker_epochs},
      {"attacker_batch", &C::attacker_batch},
      {"classifier_widths", &C::classifier_widths},
      {"classifier_iterations", &C::classifier_iterations},
      {"classifier_batch", &C::classifier_batch},
      {"classifier_weight_lr", &C::classifier_weight_lr},
      {"classifier_arch_lr", &C::classifier_arch_lr},
      {"gamma_reg", &C::gamma_reg},
      {"warmup", &C::warmup},
      {"curvature_h", &C::curvature_h},
      {"at_finetune_epochs", &C::at_finetune_epochs},
      {"at_finetune_lr", &C::at_finetune_lr},
      {"baseline_lr", &C::baseline_lr},
  };
  return kBindings;
}

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
bool ParseNumber(std::string_view s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

bool ParseIntList(std::string_view s, std::vector<int>& out) {
  out.clear();
  while (true) {
    const auto comma = s.find(',');
    int v = 0;
    if (!ParseNumber(Trim(s.substr(0, comma)), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    s.remove_prefix(comma + 1);
  }
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void Fail(int line, std::string_view key, const std::string& what) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << "key '" << key << "': " << what;
  throw ConfigError(os.str());
}

void Assign(ExperimentConfig& cfg, const Binding& b, std::string_view value, int line) {
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        T& dst = cfg.*member;
        if constexpr (std::is_same_v<T, std::string>) {
          dst = std::string(value);
        } else if constexpr (std::is_same_v<T, bool>) {
          if (value == "true" || value == "1") dst = true;
          else if (value == "false" || value == "0") dst = false;
          else Fail(line, b.key, "expected true or false, got '" + std::string(value) + "'");
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          if (!ParseIntList(value, dst))
            Fail(line, b.key, "expected a comma-separated integer list, got '" +
                                  std::string(value) + "'");
        } else {
          if (!ParseNumber(value, dst))
            Fail(line, b.key, "expected a number, got '" + std::string(value) + "'");
        }
      },
      b.field);
}

std::string Render(const ExperimentConfig& cfg, const Binding& b) {
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        const T& v = cfg.*member;
        if constexpr (std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::vector<int>>) {
          std::string s;
          for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
          return s;
        } else if constexpr (std::is_same_v<T, double>) {
          return FormatDouble(v);
        } else {
          return std::to_string(v);
        }
      },
      b.field);
}

void RequireRange(bool ok, std::string_view key, const std::string& range) {
  if (!ok) Fail(0, key, "must be " + range);
}

}  // namespace

void ExperimentConfig::Validate() const {
  RequireRange(mode == "gan" || mode == "at" || mode == "matrix-demo", "mode",
               "one of gan, at, matrix-demo");
  RequireRange(epsilon_term > 0.0 && std::isfinite(epsilon_term), "epsilon_term", "> 0");
  RequireRange(support_limit >= 2, "support_limit", ">= 2");
  RequireRange(max_epochs >= 0, "max_epochs", ">= 0");
  if (mode == "matrix-demo") {
    try {
      ParseMatrix(matrix);
    } catch (const InputError& e) {
      Fail(0, "matrix", e.what());
    }
  }
  RequireRange(ring_modes >= 1, "ring_modes", ">= 1");
  RequireRange(ring_radius > 0.0, "ring_radius", "> 0");
  RequireRange(ring_sigma >= 0.0, "ring_sigma", ">= 0");
  RequireRange(data_n >= 1, "data_n", ">= 1");
  RequireRange(latent_dim >= 1, "latent_dim", ">= 1");
  RequireRange(eval_n >= 1, "eval_n", ">= 1");
  RequireRange(sample_n >= 3, "sample_n", ">= 3");
  RequireRange(coverage_min_frac >= 0.0 && coverage_min_frac <= 1.0, "coverage_min_frac",
               "in [0, 1]");
  RequireRange(cka_probe_n >= 2, "cka_probe_n", ">= 2");
  for (const auto* w : {&gen_widths, &disc_widths, &classifier_widths}) {
    const char* key = w == &gen_widths ? "gen_widths"
                      : w == &disc_widths ? "disc_widths" : "classifier_widths";
    RequireRange(!w->empty(), key, "a non-empty list");
    for (int v : *w) RequireRange(v >= 1, key, "a list of positive widths");
  }
  RequireRange(oracle_steps >= 0, "oracle_steps", ">= 0");
  RequireRange(oracle_batch >= 1, "oracle_batch", ">= 1");
  RequireRange(top_k >= 1, "top_k", ">= 1");
  RequireRange(arch_lr >= 0.0, "arch_lr", ">= 0");
  RequireRange(weight_lr >= 0.0, "weight_lr", ">= 0");
  RequireRange(selection_batch >= 1, "selection_batch", ">= 1");
  RequireRange(finetune == "none" || finetune == "hm" || finetune == "nash", "finetune",
               "one of none, hm, nash");
  RequireRange(hm_discriminator == "newest" || hm_discriminator == "dominant", "hm_discriminator",
               "one of newest, dominant");
  RequireRange(init_finetune_rounds >= 0, "init_finetune_rounds", ">= 0");
  RequireRange(finetune_rounds >= 0, "finetune_rounds", ">= 0");
  RequireRange(finetune_steps >= 0, "finetune_steps", ">= 0");
  RequireRange(finetune_batch >= 1, "finetune_batch", ">= 1");
  RequireRange(init_lr >= 0.0, "init_lr", ">= 0");
  RequireRange(gen_lr >= 0.0, "gen_lr", ">= 0");
  RequireRange(disc_lr >= 0.0, "disc_lr", ">= 0");
  RequireRange(moons_n >= 8, "moons_n", ">= 8");
  RequireRange(moons_noise >= 0.0, "moons_noise", ">= 0");
  RequireRange(epsilon_atk > 0.0, "epsilon_atk", "> 0");
  RequireRange(hops >= 1, "hops", ">= 1");
  RequireRange(attacker_epochs >= 0, "attacker_epochs", ">= 0");
  RequireRange(attacker_batch >= 1, "attacker_batch", ">= 1");
  RequireRange(classifier_iterations >= 0, "classifier_iterations", ">= 0");
  RequireRange(classifier_batch >= 1, "classifier_batch", ">= 1");
  RequireRange(classifier_weight_lr >= 0.0, "classifier_weight_lr", ">= 0");
  RequireRange(classifier_arch_lr >= 0.0, "classifier_arch_lr", ">= 0");
  RequireRange(gamma_reg >= 0.0, "gamma_reg", ">= 0");
  RequireRange(warmup >= 0, "warmup", ">= 0");
  RequireRange(curvature_h > 0.0, "curvature_h", "> 0");
  RequireRange(at_finetune_epochs >= 0, "at_finetune_epochs", ">= 0");
  RequireRange(at_finetune_lr >= 0.0, "at_finetune_lr", ">= 0");
  RequireRange(baseline_lr >= 0.0, "baseline_lr", ">= 0");
}

std::string ExperimentConfig::ToText() const {
  std::string out;
  for (const Binding& b : Bindings()) out += std::string(b.key) + " = " + Render(*this, b) + "\n";
  return out;
}

ExperimentConfig ParseConfig(std::string_view text) {
  ExperimentConfig cfg;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                        std::string(line) + "'");
    }
    const std::string_view key = Trim(line.substr(0, eq));
    const std::string_view value = Trim(line.substr(eq + 1));
    const Binding* binding = nullptr;
    for (const Binding& b : Bindings())
      if (key == b.key) binding = &b;
    if (binding == nullptr) Fail(line_no, key, "unknown key");
    if (auto it = seen.find(key); it != seen.end())
      Fail(line_no, key, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    seen.emplace(std::string(key), line_no);
    if (value.empty()) Fail(line_no, key, "missing value");
    Assign(cfg, *binding, value, line_no);
  }
  try {
    cfg.Validate();
  } catch (const ConfigError& e) {
    // Point at the offending line when the key was set explicitly.
    const std::string msg = e.what();
    const auto q1 = msg.find('\'');
    const auto q2 = msg.find('\'', q1 + 1);
    if (q1 != std::string::npos && q2 != std::string::npos) {
      if (auto it = seen.find(msg.substr(q1 + 1, q2 - q1 - 1)); it != seen.end())
        throw ConfigError("line " + std::to_string(it->second) + ": " + msg);
    }
    throw;
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

Matrix ParseMatrix(std::string_view text) {
  std::vector<std::vector<double>> rows;
  while (true) {
    const auto semi = text.find(';');
    std::string_view row = Trim(text.substr(0, semi));
    std::vector<double> vals;
    while (true) {
      const auto comma = row.find(',');
      double v = 0.0;
      if (!ParseNumber(Trim(row.substr(0, comma)), v))
        throw InputError("matrix: bad entry '" + std::string(Trim(row.substr(0, comma))) + "'");
      vals.push_back(v);
      if (comma == std::string_view::npos) break;
      row.remove_prefix(comma + 1);
    }
    if (!rows.empty() && vals.size() != rows.front().size())
      throw InputError("matrix: rows have different lengths");
    rows.push_back(std::move(vals));
    if (semi == std::string_view::npos) break;
    text.remove_prefix(semi + 1);
  }
  Matrix m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  if (!m.allFinite()) throw InputError("matrix: non-finite entry");
  return m;
}

}  // namespace donas
