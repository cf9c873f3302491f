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

#include "donas/supernet.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace donas::nas {
namespace {

Vector Softmax(const Vector& logits) {
  const double mx = logits.maxCoeff();
  Vector e = (logits.array() - mx).exp().matrix();
  return e / e.sum();
}

constexpr int kMaxEnumeration = 1 << 16;

}  // namespace

std::vector<CandidateSpec> DefaultCandidates() {
  return {{OpKind::kIdentity, nn::Activation::kIdentity},
          {OpKind::kAffine, nn::Activation::kTanh},
          {OpKind::kAffine, nn::Activation::kRelu},
          {OpKind::kAffine, nn::Activation::kSigmoid}};
}

Supernet::Supernet(std::vector<Cell> cells, std::optional<nn::Layer> head)
    : cells_(std::move(cells)), head_(std::move(head)) {
  DONAS_REQUIRE(!cells_.empty(), "Supernet needs at least one cell");
  for (size_t c = 0; c < cells_.size(); ++c) {
    const Cell& cell = cells_[c];
    DONAS_REQUIRE(cell.ops.size() >= 2, "Supernet: every cell needs >= 2 candidates");
    DONAS_REQUIRE(cell.alpha.size() == static_cast<int>(cell.ops.size()),
                  "Supernet: alpha length must equal the candidate count");
    if (c > 0) {
      DONAS_REQUIRE(cell.in_dim == cells_[c - 1].out_dim,
                    "Supernet: cell widths do not chain");
    }
    for (const CandidateOp& op : cell.ops) {
      if (op.kind == OpKind::kIdentity) {
        DONAS_REQUIRE(cell.in_dim == cell.out_dim,
                      "Supernet: identity candidate needs equal widths");
      } else {
        DONAS_REQUIRE(op.layer.in_dim() == cell.in_dim &&
                          op.layer.out_dim() == cell.out_dim &&
                          op.layer.bias.size() == cell.out_dim,
                      "Supernet: candidate shape does not match its cell");
      }
    }
  }
  if (head_) {
    DONAS_REQUIRE(head_->in_dim() == cells_.back().out_dim,
                  "Supernet: head input does not match the last cell");
  }
}

Supernet Supernet::Random(const SupernetSpec& spec, Rng& rng) {
  DONAS_REQUIRE(!spec.cell_widths.empty(), "SupernetSpec: no cells");
  std::vector<Cell> cells;
  int in = spec.input_dim;
  for (int width : spec.cell_widths) {
    Cell cell;
    cell.in_dim = in;
    cell.out_dim = width;
    for (const CandidateSpec& cand : spec.candidates) {
      CandidateOp op;
      op.kind = cand.kind;
      if (cand.kind == OpKind::kIdentity) {
        if (in != width) continue;
      } else {
        op.layer = nn::GlorotLayer(in, width, cand.activation, rng);
      }
      cell.ops.push_back(std::move(op));
    }
    cell.alpha = Vector::Zero(static_cast<int>(cell.ops.size()));
    cells.push_back(std::move(cell));
    in = width;
  }
  std::optional<nn::Layer> head;
  if (spec.head) {
    head = nn::GlorotLayer(in, spec.head->out_dim, spec.head->activation, rng);
  }
  return Supernet(std::move(cells), std::move(head));
}

int Supernet::output_dim() const {
  return head_ ? head_->out_dim() : cells_.back().out_dim;
}

int Supernet::arch_count() const {
  int n = 0;
  for (const Cell& c : cells_) n += static_cast<int>(c.alpha.size());
  return n;
}

int Supernet::weight_count() const {
  int n = 0;
  for (const Cell& c : cells_)
    for (const CandidateOp& op : c.ops) n += op.param_count();
  if (head_) n += head_->param_count();
  return n;
}

Vector Supernet::ArchParams() const {
  Vector a(arch_count());
  int k = 0;
  for (const Cell& c : cells_) {
    a.segment(k, c.alpha.size()) = c.alpha;
    k += static_cast<int>(c.alpha.size());
  }
  return a;
}

void Supernet::SetArchParams(const Vector& alpha) {
  DONAS_REQUIRE(alpha.size() == arch_count(), "SetArchParams: length mismatch");
  int k = 0;
  for (Cell& c : cells_) {
    c.alpha = alpha.segment(k, c.alpha.size());
    k += static_cast<int>(c.alpha.size());
  }
}

namespace {

void AppendLayer(const nn::Layer& l, Vector& out, int& k) {
  for (int r = 0; r < l.weight.rows(); ++r)
    for (int c = 0; c < l.weight.cols(); ++c) out[k++] = l.weight(r, c);
  for (int r = 0; r < l.bias.size(); ++r) out[k++] = l.bias[r];
}

void ReadLayer(nn::Layer& l, const Vector& in, int& k) {
  for (int r = 0; r < l.weight.rows(); ++r)
    for (int c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = in[k++];
  for (int r = 0; r < l.bias.size(); ++r) l.bias[r] = in[k++];
}

}  // namespace

Vector Supernet::WeightParams() const {
  Vector w(weight_count());
  int k = 0;
  for (const Cell& c : cells_)
    for (const CandidateOp& op : c.ops)
      if (op.kind == OpKind::kAffine) AppendLayer(op.layer, w, k);
  if (head_) AppendLayer(*head_, w, k);
  return w;
}

void Supernet::SetWeightParams(const Vector& weights) {
  DONAS_REQUIRE(weights.size() == weight_count(), "SetWeightParams: length mismatch");
  int k = 0;
  for (Cell& c : cells_)
    for (CandidateOp& op : c.ops)
      if (op.kind == OpKind::kAffine) ReadLayer(op.layer, weights, k);
  if (head_) ReadLayer(*head_, weights, k);
}

Vector Supernet::CellProbabilities(int cell) const {
  const Vector& alpha = cells_.at(cell).alpha;
  if (!alpha.allFinite()) {
    throw NumericError("non-finite architecture weights in cell " +
                       std::to_string(cell));
  }
  return Softmax(alpha);
}

SupernetTrace Supernet::Trace(const Matrix& x) const {
  DONAS_REQUIRE(x.cols() == input_dim(), "Supernet: input dimension mismatch");
  if (!x.allFinite()) throw InputError("Supernet: non-finite input");
  SupernetTrace t;
  const int n_cells = num_cells();
  t.cell_inputs.reserve(n_cells);
  t.probs.reserve(n_cells);
  t.op_pre.resize(n_cells);
  t.op_post.resize(n_cells);
  t.cell_outputs.reserve(n_cells);
  Matrix h = x;
  for (int c = 0; c < n_cells; ++c) {
    const Cell& cell = cells_[c];
    t.probs.push_back(CellProbabilities(c));
    const Vector& p = t.probs.back();
    Matrix out = Matrix::Zero(h.rows(), cell.out_dim);
    for (size_t o = 0; o < cell.ops.size(); ++o) {
      const CandidateOp& op = cell.ops[o];
      if (op.kind == OpKind::kIdentity) {
        t.op_pre[c].emplace_back();
        t.op_post[c].push_back(h);
      } else {
        t.op_pre[c].push_back((h * op.layer.weight.transpose()).rowwise() +
                              op.layer.bias.transpose());
        t.op_post[c].push_back(nn::Activate(op.layer.activation, t.op_pre[c].back()));
      }
      out += p[static_cast<int>(o)] * t.op_post[c].back();
    }
    if (!out.allFinite()) {
      throw NumericError("non-finite activation in cell " + std::to_string(c));
    }
    t.cell_inputs.push_back(std::move(h));
    t.cell_outputs.push_back(out);
    h = std::move(out);
  }
  if (head_) {
    t.head_pre = (h * head_->weight.transpose()).rowwise() + head_->bias.transpose();
    t.output = nn::Activate(head_->activation, t.head_pre);
    if (!t.output.allFinite()) throw NumericError("non-finite activation in head");
  } else {
    t.output = h;
  }
  return t;
}

Matrix Supernet::MixedForward(const Matrix& x) const { return Trace(x).output; }

SupernetGradients Supernet::Backward(const SupernetTrace& t,
                                     const Matrix& output_grad) const {
  DONAS_REQUIRE(output_grad.rows() == t.output.rows() &&
                    output_grad.cols() == t.output.cols(),
                "Supernet::Backward: output gradient shape mismatch");
  SupernetGradients g;
  g.arch = Vector::Zero(arch_count());
  g.weights = Vector::Zero(weight_count());

  // Offsets into the flat vectors.
  std::vector<int> arch_offset(cells_.size());
  std::vector<std::vector<int>> weight_offset(cells_.size());
  int ka = 0, kw = 0;
  for (size_t c = 0; c < cells_.size(); ++c) {
    arch_offset[c] = ka;
    ka += static_cast<int>(cells_[c].alpha.size());
    for (const CandidateOp& op : cells_[c].ops) {
      weight_offset[c].push_back(kw);
      kw += op.param_count();
    }
  }

  Matrix upstream = output_grad;
  if (head_) {
    const Matrix delta = nn::ActivationBackward(head_->activation, t.head_pre,
                                                t.output, upstream);
    const Matrix gw = delta.transpose() * t.cell_outputs.back();
    const Vector gb = delta.colwise().sum().transpose();
    int k = kw;
    for (int r = 0; r < gw.rows(); ++r)
      for (int c = 0; c < gw.cols(); ++c) g.weights[k++] = gw(r, c);
    for (int r = 0; r < gb.size(); ++r) g.weights[k++] = gb[r];
    upstream = delta * head_->weight;
  }

  for (int c = num_cells() - 1; c >= 0; --c) {
    const Cell& cell = cells_[c];
    const Vector& p = t.probs[c];
    const int n_ops = static_cast<int>(cell.ops.size());
    Vector score(n_ops);
    for (int o = 0; o < n_ops; ++o) {
      score[o] = (upstream.array() * t.op_post[c][o].array()).sum();
    }
    const double mean_score = p.dot(score);
    for (int o = 0; o < n_ops; ++o) {
      g.arch[arch_offset[c] + o] = p[o] * (score[o] - mean_score);
    }

    Matrix down = Matrix::Zero(t.cell_inputs[c].rows(), cell.in_dim);
    for (int o = 0; o < n_ops; ++o) {
      const CandidateOp& op = cell.ops[o];
      const Matrix scaled = p[o] * upstream;
      if (op.kind == OpKind::kIdentity) {
        down += scaled;
        continue;
      }
      const Matrix delta = nn::ActivationBackward(
          op.layer.activation, t.op_pre[c][o], t.op_post[c][o], scaled);
      const Matrix gw = delta.transpose() * t.cell_inputs[c];
      const Vector gb = delta.colwise().sum().transpose();
      int k = weight_offset[c][o];
      for (int r = 0; r < gw.rows(); ++r)
        for (int cc = 0; cc < gw.cols(); ++cc) g.weights[k++] = gw(r, cc);
      for (int r = 0; r < gb.size(); ++r) g.weights[k++] = gb[r];
      down += delta * op.layer.weight;
    }
    upstream = std::move(down);
  }
  if (!g.arch.allFinite() || !g.weights.allFinite()) {
    throw NumericError("non-finite supernet gradient");
  }
  g.input = std::move(upstream);
  return g;
}

nn::Network Supernet::Extract(const ArchChoice& choice) const {
  DONAS_REQUIRE(static_cast<int>(choice.ops.size()) == num_cells(),
                "Extract: one candidate index per cell required");
  std::vector<nn::Layer> layers;
  for (int c = 0; c < num_cells(); ++c) {
    const Cell& cell = cells_[c];
    const int o = choice.ops[c];
    DONAS_REQUIRE(o >= 0 && o < static_cast<int>(cell.ops.size()),
                  "Extract: candidate index out of range");
    const CandidateOp& op = cell.ops[o];
    if (op.kind == OpKind::kIdentity) {
      nn::Layer id;
      id.weight = Matrix::Identity(cell.out_dim, cell.in_dim);
      id.bias = Vector::Zero(cell.out_dim);
      id.activation = nn::Activation::kIdentity;
      layers.push_back(std::move(id));
    } else {
      layers.push_back(op.layer);
    }
  }
  if (head_) layers.push_back(*head_);
  return nn::Network(std::move(layers));
}

ArchChoice Supernet::ArgmaxChoice() const {
  ArchChoice choice;
  for (const Cell& cell : cells_) {
    int best = 0;
    for (int o = 1; o < cell.alpha.size(); ++o)
      if (cell.alpha[o] > cell.alpha[best]) best = o;
    choice.ops.push_back(best);
  }
  return choice;
}

Vector ArchGrad(const Supernet& net, const Matrix& x, const nn::Loss& loss) {
  const SupernetTrace t = net.Trace(x);
  return net.Backward(t, nn::EvaluateLoss(loss, t.output).output_grad).arch;
}

Vector WeightGrad(const Supernet& net, const Matrix& x, const nn::Loss& loss) {
  const SupernetTrace t = net.Trace(x);
  return net.Backward(t, nn::EvaluateLoss(loss, t.output).output_grad).weights;
}

double ChoiceProbability(const Supernet& net, const ArchChoice& choice) {
  DONAS_REQUIRE(static_cast<int>(choice.ops.size()) == net.num_cells(),
                "ChoiceProbability: one index per cell required");
  double p = 1.0;
  for (int c = 0; c < net.num_cells(); ++c) p *= net.CellProbabilities(c)[choice.ops[c]];
  return p;
}

std::vector<ArchChoice> SampleTopK(const Supernet& net, int k) {
  DONAS_REQUIRE(k >= 1, "SampleTopK: k must be >= 1");
  std::vector<Vector> probs;
  long total = 1;
  for (int c = 0; c < net.num_cells(); ++c) {
    probs.push_back(net.CellProbabilities(c));
    total *= probs.back().size();
    DONAS_REQUIRE(total <= kMaxEnumeration, "SampleTopK: search space too large to enumerate");
  }
  struct Entry {
    ArchChoice choice;
    double prob;
  };
  std::vector<Entry> all;
  all.reserve(total);
  std::vector<int> idx(net.num_cells(), 0);
  for (long e = 0; e < total; ++e) {
    double p = 1.0;
    for (int c = 0; c < net.num_cells(); ++c) p *= probs[c][idx[c]];
    all.push_back({ArchChoice{idx}, p});
    // Odometer increment, last cell fastest.
    for (int c = net.num_cells() - 1; c >= 0; --c) {
      if (++idx[c] < probs[c].size()) break;
      idx[c] = 0;
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Entry& a, const Entry& b) { return a.prob > b.prob; });
  std::vector<ArchChoice> out;
  const long n = std::min<long>(k, total);
  for (long i = 0; i < n; ++i) out.push_back(std::move(all[i].choice));
  return out;
}

int SelectByLoss(const std::vector<nn::Network>& candidates,
                 const std::function<double(const nn::Network&)>& loss) {
  DONAS_REQUIRE(!candidates.empty(), "SelectByLoss: no candidates");
  int best = 0;
  double best_loss = loss(candidates[0]);
  for (size_t i = 1; i < candidates.size(); ++i) {
    const double l = loss(candidates[i]);
    if (l < best_loss) {
      best = static_cast<int>(i);
      best_loss = l;
    }
  }
  return best;
}

}  // namespace donas::nas
