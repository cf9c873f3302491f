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

#include "donas/serialize.h"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace donas::io {

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Writer::Sep() {
  if (!line_start_) out_ += ' ';
  line_start_ = false;
}

void Writer::Key(std::string_view key) {
  if (!line_start_) EndLine();
  Sep();
  out_ += key;
}

void Writer::Word(std::string_view word) {
  Sep();
  out_ += word;
}

void Writer::Int(int64_t v) {
  Sep();
  out_ += std::to_string(v);
}

void Writer::UInt(uint64_t v) {
  Sep();
  out_ += std::to_string(v);
}

void Writer::Double(double v) {
  Sep();
  out_ += FormatDouble(v);
}

void Writer::String(std::string_view s) {
  Sep();
  out_ += std::to_string(s.size());
  out_ += ':';
  out_ += s;
}

void Writer::Mat(const Matrix& m) {
  Int(m.rows());
  Int(m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    EndLine();
    for (int j = 0; j < m.cols(); ++j) Double(m(i, j));
  }
}

void Writer::Vec(const Vector& v) {
  Int(v.size());
  for (int i = 0; i < v.size(); ++i) Double(v[i]);
}

void Writer::EndLine() {
  out_ += '\n';
  line_start_ = true;
}

void Reader::SkipSpace() {
  while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
}

void Reader::Fail(size_t at, const std::string& msg) const {
  throw FormatError(msg + " at byte " + std::to_string(at));
}

bool Reader::AtEnd() {
  SkipSpace();
  return pos_ >= data_.size();
}

std::string Reader::Token(std::string_view what) {
  SkipSpace();
  if (pos_ >= data_.size()) {
    Fail(pos_, "truncated data: expected " + std::string(what) + ", found end of input");
  }
  const size_t start = pos_;
  while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
  return data_.substr(start, pos_ - start);
}

void Reader::Expect(std::string_view key) {
  SkipSpace();
  const size_t at = pos_;
  const std::string tok = Token("'" + std::string(key) + "'");
  if (tok != key) Fail(at, "expected '" + std::string(key) + "', got '" + tok + "'");
}

namespace {

template <typename T>
bool ParseAll(const std::string& s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

int64_t Reader::Int(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const std::string tok = Token(what);
  int64_t v = 0;
  if (!ParseAll(tok, v)) Fail(at, "expected integer " + std::string(what) + ", got '" + tok + "'");
  return v;
}

uint64_t Reader::UInt(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const std::string tok = Token(what);
  uint64_t v = 0;
  if (!ParseAll(tok, v)) Fail(at, "expected unsigned " + std::string(what) + ", got '" + tok + "'");
  return v;
}

double Reader::Double(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const std::string tok = Token(what);
  double v = 0.0;
  if (!ParseAll(tok, v)) Fail(at, "expected number " + std::string(what) + ", got '" + tok + "'");
  return v;
}

bool Reader::Bool(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const int64_t v = Int(what);
  if (v != 0 && v != 1) Fail(at, "expected 0 or 1 for " + std::string(what));
  return v == 1;
}

std::string Reader::String(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const size_t colon = data_.find(':', pos_);
  if (colon == std::string::npos) Fail(at, "truncated data: expected string " + std::string(what));
  uint64_t len = 0;
  if (!ParseAll(data_.substr(pos_, colon - pos_), len))
    Fail(at, "expected string length for " + std::string(what));
  if (colon + 1 + len > data_.size()) {
    Fail(data_.size(), "truncated data: string " + std::string(what) + " needs " +
                           std::to_string(len) + " bytes");
  }
  pos_ = colon + 1 + len;
  return data_.substr(colon + 1, len);
}

Matrix Reader::Mat(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const int64_t rows = Int(what);
  const int64_t cols = Int(what);
  if (rows < 0 || cols < 0) Fail(at, "negative matrix shape for " + std::string(what));
  Matrix m(rows, cols);
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j) m(i, j) = Double(what);
  return m;
}

Vector Reader::Vec(std::string_view what) {
  SkipSpace();
  const size_t at = pos_;
  const int64_t n = Int(what);
  if (n < 0) Fail(at, "negative vector length for " + std::string(what));
  Vector v(n);
  for (int64_t i = 0; i < n; ++i) v[i] = Double(what);
  return v;
}

void Write(Writer& w, const PayoffMatrix& u) {
  w.Key("payoff");
  w.Mat(u.entries());
}

void Write(Writer& w, const MixedStrategy& s) {
  w.Key("mixed");
  w.Vec(s.probs());
}

void Write(Writer& w, const EpochRecord& r) {
  w.Key("epoch_record");
  w.Int(r.epoch);
  w.Double(r.game_value);
  w.Double(r.row_gain);
  w.Double(r.col_gain);
  w.Int(r.row_pool);
  w.Int(r.col_pool);
  w.Int(r.pruned_rows);
  w.Int(r.pruned_cols);
  w.Bool(r.terminated);
}

namespace {

void WriteLayer(Writer& w, const nn::Layer& l) {
  w.Key("layer");
  w.Word(nn::ActivationName(l.activation));
  w.Key("weight");
  w.Mat(l.weight);
  w.Key("bias");
  w.Vec(l.bias);
}

nn::Layer ReadLayer(Reader& r) {
  r.Expect("layer");
  nn::Layer l;
  const std::string act = r.Token("activation");
  try {
    l.activation = nn::ParseActivation(act);
  } catch (const Error&) {
    throw FormatError("unknown activation '" + act + "' before byte " +
                      std::to_string(r.offset()));
  }
  r.Expect("weight");
  l.weight = r.Mat("layer weight");
  r.Expect("bias");
  l.bias = r.Vec("layer bias");
  if (l.bias.size() != l.weight.rows())
    throw FormatError("layer bias does not match weight rows before byte " +
                      std::to_string(r.offset()));
  return l;
}

}  // namespace

void Write(Writer& w, const nn::Network& net) {
  w.Key("network");
  w.Int(net.num_layers());
  for (const nn::Layer& l : net.layers()) WriteLayer(w, l);
}

void Write(Writer& w, const nas::Supernet& net) {
  w.Key("supernet");
  w.Int(net.num_cells());
  for (const nas::Cell& c : net.cells()) {
    w.Key("cell");
    w.Int(c.in_dim);
    w.Int(c.out_dim);
    w.Key("alpha");
    w.Vec(c.alpha);
    w.Key("ops");
    w.Int(static_cast<int64_t>(c.ops.size()));
    for (const nas::CandidateOp& op : c.ops) {
      if (op.kind == nas::OpKind::kIdentity) {
        w.Key("identity");
      } else {
        w.Key("affine");
        WriteLayer(w, op.layer);
      }
    }
  }
  w.Key("head");
  w.Bool(net.head().has_value());
  if (net.head()) WriteLayer(w, *net.head());
}

void Write(Writer& w, const at::Perturbation& p) {
  w.Key("perturbation");
  w.Double(p.budget);
  w.Mat(p.delta);
}

void Write(Writer& w, const nn::OptimState& opt) {
  w.Key("optimizer");
  w.Word(nn::OptimizerName(opt.kind));
  w.Double(opt.learning_rate);
  w.Word(opt.direction == nn::Direction::kDescent ? "descent" : "ascent");
  w.Double(opt.beta1);
  w.Double(opt.beta2);
  w.Double(opt.eps);
  w.Int(opt.t);
  w.Key("m");
  w.Vec(opt.m);
  w.Key("v");
  w.Vec(opt.v);
}

PayoffMatrix ReadPayoff(Reader& r) {
  r.Expect("payoff");
  const size_t at = r.offset();
  Matrix m = r.Mat("payoff");
  if (m.size() == 0) return PayoffMatrix();
  try {
    return PayoffMatrix(std::move(m));
  } catch (const InputError& e) {
    throw FormatError(std::string("invalid payoff matrix (") + e.what() + ") at byte " +
                      std::to_string(at));
  }
}

MixedStrategy ReadMixedStrategy(Reader& r) {
  r.Expect("mixed");
  const size_t at = r.offset();
  Vector v = r.Vec("mixed strategy");
  if (v.size() == 0) return MixedStrategy();
  try {
    return MixedStrategy(std::move(v));
  } catch (const InputError& e) {
    throw FormatError(std::string("invalid mixed strategy (") + e.what() + ") at byte " +
                      std::to_string(at));
  }
}

EpochRecord ReadEpochRecord(Reader& r) {
  r.Expect("epoch_record");
  EpochRecord e;
  e.epoch = static_cast<int>(r.Int("epoch"));
  e.game_value = r.Double("game_value");
  e.row_gain = r.Double("row_gain");
  e.col_gain = r.Double("col_gain");
  e.row_pool = static_cast<int>(r.Int("row_pool"));
  e.col_pool = static_cast<int>(r.Int("col_pool"));
  e.pruned_rows = static_cast<int>(r.Int("pruned_rows"));
  e.pruned_cols = static_cast<int>(r.Int("pruned_cols"));
  e.terminated = r.Bool("terminated");
  return e;
}

nn::Network ReadNetwork(Reader& r) {
  r.Expect("network");
  const size_t at = r.offset();
  const int64_t n = r.Int("layer count");
  std::vector<nn::Layer> layers;
  for (int64_t i = 0; i < n; ++i) layers.push_back(ReadLayer(r));
  try {
    return nn::Network(std::move(layers));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid network (") + e.what() + ") at byte " +
                      std::to_string(at));
  }
}

nas::Supernet ReadSupernet(Reader& r) {
  r.Expect("supernet");
  const size_t at = r.offset();
  const int64_t n = r.Int("cell count");
  std::vector<nas::Cell> cells;
  for (int64_t i = 0; i < n; ++i) {
    r.Expect("cell");
    nas::Cell c;
    c.in_dim = static_cast<int>(r.Int("cell in_dim"));
    c.out_dim = static_cast<int>(r.Int("cell out_dim"));
    r.Expect("alpha");
    c.alpha = r.Vec("alpha");
    r.Expect("ops");
    const int64_t n_ops = r.Int("op count");
    for (int64_t o = 0; o < n_ops; ++o) {
      const size_t op_at = r.offset();
      const std::string kind = r.Token("op kind");
      nas::CandidateOp op;
      if (kind == "identity") {
        op.kind = nas::OpKind::kIdentity;
      } else if (kind == "affine") {
        op.kind = nas::OpKind::kAffine;
        op.layer = ReadLayer(r);
      } else {
        throw FormatError("unknown op kind '" + kind + "' at byte " + std::to_string(op_at));
      }
      c.ops.push_back(std::move(op));
    }
    cells.push_back(std::move(c));
  }
  r.Expect("head");
  std::optional<nn::Layer> head;
  if (r.Bool("head flag")) head = ReadLayer(r);
  try {
    return nas::Supernet(std::move(cells), std::move(head));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid supernet (") + e.what() + ") at byte " +
                      std::to_string(at));
  }
}

at::Perturbation ReadPerturbation(Reader& r) {
  r.Expect("perturbation");
  at::Perturbation p;
  p.budget = r.Double("budget");
  p.delta = r.Mat("delta");
  return p;
}

nn::OptimState ReadOptimState(Reader& r) {
  r.Expect("optimizer");
  nn::OptimState o;
  const size_t at = r.offset();
  const std::string kind = r.Token("optimizer kind");
  if (kind == nn::OptimizerName(nn::OptimizerKind::kSgd)) {
    o.kind = nn::OptimizerKind::kSgd;
  } else if (kind == nn::OptimizerName(nn::OptimizerKind::kAdam)) {
    o.kind = nn::OptimizerKind::kAdam;
  } else {
    throw FormatError("unknown optimizer '" + kind + "' at byte " + std::to_string(at));
  }
  o.learning_rate = r.Double("learning_rate");
  const std::string dir = r.Token("direction");
  if (dir != "descent" && dir != "ascent")
    throw FormatError("unknown direction '" + dir + "' before byte " + std::to_string(r.offset()));
  o.direction = dir == "descent" ? nn::Direction::kDescent : nn::Direction::kAscent;
  o.beta1 = r.Double("beta1");
  o.beta2 = r.Double("beta2");
  o.eps = r.Double("eps");
  o.t = r.Int("t");
  r.Expect("m");
  o.m = r.Vec("m");
  r.Expect("v");
  o.v = r.Vec("v");
  return o;
}

}  // namespace donas::io
