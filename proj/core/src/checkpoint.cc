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

#include "donas/checkpoint.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace donas {
namespace {

void WritePool(io::Writer& w, std::string_view name, const Pool& pool) {
  w.Key(name);
  std::visit(
      [&](const auto& items) {
        using T = typename std::decay_t<decltype(items)>::value_type;
        if constexpr (std::is_same_v<T, int>) {
          w.Word("index");
          w.Int(static_cast<int64_t>(items.size()));
          for (int v : items) w.Int(v);
        } else {
          w.Word(std::is_same_v<T, nn::Network> ? "network" : "perturbation");
          w.Int(static_cast<int64_t>(items.size()));
          for (const T& v : items) io::Write(w, v);
        }
      },
      pool);
}

Pool ReadPool(io::Reader& r, std::string_view name) {
  r.Expect(name);
  const size_t at = r.offset();
  const std::string kind = r.Token("pool kind");
  const int64_t n = r.Int("pool size");
  if (kind == "index") {
    std::vector<int> v;
    for (int64_t i = 0; i < n; ++i) v.push_back(static_cast<int>(r.Int("pool index")));
    return v;
  }
  if (kind == "network") {
    std::vector<nn::Network> v;
    for (int64_t i = 0; i < n; ++i) v.push_back(io::ReadNetwork(r));
    return v;
  }
  if (kind == "perturbation") {
    std::vector<at::Perturbation> v;
    for (int64_t i = 0; i < n; ++i) v.push_back(io::ReadPerturbation(r));
    return v;
  }
  throw io::FormatError("unknown pool kind '" + kind + "' at byte " + std::to_string(at));
}

}  // namespace

std::string SerializeCheckpoint(const RunState& s) {
  io::Writer w;
  w.Key(kCheckpointMagic);
  w.Key("schema");
  w.Int(kCheckpointSchema);
  w.Key("mode");
  w.String(s.mode);
  w.Key("seed");
  w.UInt(s.seed);
  w.Key("config");
  w.String(s.config_text);
  w.Key("epoch");
  w.Int(s.epoch);
  w.Key("terminated");
  w.Bool(s.terminated);
  io::Write(w, s.payoff);
  w.Key("row_strategy");
  io::Write(w, s.row_strategy);
  w.Key("col_strategy");
  io::Write(w, s.col_strategy);
  w.Key("trace");
  w.Int(static_cast<int64_t>(s.trace.size()));
  for (const EpochRecord& e : s.trace) io::Write(w, e);
  WritePool(w, "row_pool", s.row_pool);
  WritePool(w, "col_pool", s.col_pool);
  w.Key("supernets");
  w.Int(static_cast<int64_t>(s.supernets.size()));
  for (const nas::Supernet& n : s.supernets) io::Write(w, n);
  w.Key("optimizers");
  w.Int(static_cast<int64_t>(s.optimizers.size()));
  for (const nn::OptimState& o : s.optimizers) io::Write(w, o);
  w.Key("end");
  w.EndLine();
  return w.str();
}

RunState ParseCheckpoint(std::string data) {
  if (data.compare(0, kCheckpointMagic.size(), kCheckpointMagic) != 0) {
    throw io::FormatError("not a checkpoint: expected magic '" + std::string(kCheckpointMagic) +
                          "' at byte 0");
  }
  io::Reader r(std::move(data));
  r.Expect(kCheckpointMagic);
  r.Expect("schema");
  const int64_t schema = r.Int("schema version");
  if (schema != kCheckpointSchema) {
    throw io::FormatError("checkpoint schema version " + std::to_string(schema) +
                          " is not supported; this build reads version " +
                          std::to_string(kCheckpointSchema));
  }
  RunState s;
  r.Expect("mode");
  s.mode = r.String("mode");
  r.Expect("seed");
  s.seed = r.UInt("seed");
  r.Expect("config");
  s.config_text = r.String("config");
  r.Expect("epoch");
  s.epoch = static_cast<int>(r.Int("epoch"));
  r.Expect("terminated");
  s.terminated = r.Bool("terminated");
  s.payoff = io::ReadPayoff(r);
  r.Expect("row_strategy");
  s.row_strategy = io::ReadMixedStrategy(r);
  r.Expect("col_strategy");
  s.col_strategy = io::ReadMixedStrategy(r);
  r.Expect("trace");
  const int64_t n_trace = r.Int("trace length");
  for (int64_t i = 0; i < n_trace; ++i) s.trace.push_back(io::ReadEpochRecord(r));
  s.row_pool = ReadPool(r, "row_pool");
  s.col_pool = ReadPool(r, "col_pool");
  r.Expect("supernets");
  const int64_t n_super = r.Int("supernet count");
  for (int64_t i = 0; i < n_super; ++i) s.supernets.push_back(io::ReadSupernet(r));
  r.Expect("optimizers");
  const int64_t n_opt = r.Int("optimizer count");
  for (int64_t i = 0; i < n_opt; ++i) s.optimizers.push_back(io::ReadOptimState(r));
  r.Expect("end");
  if (!r.AtEnd()) {
    throw io::FormatError("trailing data after checkpoint end at byte " +
                          std::to_string(r.offset()));
  }
  return s;
}

void SaveCheckpoint(const RunState& state, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write checkpoint '" + tmp + "'");
    out << SerializeCheckpoint(state);
    if (!out) throw InputError("failed writing checkpoint '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

RunState LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseCheckpoint(ss.str());
}

}  // namespace donas
