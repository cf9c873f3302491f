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

#ifndef DONAS_SUPERNET_H_
#define DONAS_SUPERNET_H_

#include <functional>
#include <optional>
#include <vector>

#include "donas/common.h"
#include "donas/diffnet.h"
#include "donas/rng.h"

namespace donas::nas {

enum class OpKind { kIdentity, kAffine };

struct CandidateSpec {
  OpKind kind = OpKind::kAffine;
  nn::Activation activation = nn::Activation::kIdentity;
};

// {identity, affine+tanh, affine+relu, affine+sigmoid}. Identity is dropped
// from cells whose input and output widths differ.
std::vector<CandidateSpec> DefaultCandidates();

// One candidate transform of a cell. Identity ops carry no parameters.
struct CandidateOp {
  OpKind kind = OpKind::kAffine;
  nn::Layer layer;

  int param_count() const { return kind == OpKind::kAffine ? layer.param_count() : 0; }
  friend bool operator==(const CandidateOp&, const CandidateOp&) = default;
};

struct Cell {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<CandidateOp> ops;
  Vector alpha;  // one logit per candidate

  friend bool operator==(const Cell& a, const Cell& b) {
    return a.in_dim == b.in_dim && a.out_dim == b.out_dim && a.ops == b.ops &&
           a.alpha.size() == b.alpha.size() && a.alpha == b.alpha;
  }
};

struct SupernetSpec {
  int input_dim = 2;
  std::vector<int> cell_widths;
  std::vector<CandidateSpec> candidates = DefaultCandidates();
  // Fixed (non-searched) output layer appended after the cells.
  std::optional<nn::LayerSpec> head;
};

// One candidate index per cell.
struct ArchChoice {
  std::vector<int> ops;
  friend bool operator==(const ArchChoice&, const ArchChoice&) = default;
};

struct SupernetTrace {
  std::vector<Matrix> cell_inputs;
  std::vector<Vector> probs;
  // op_pre[c][o] / op_post[c][o]; identity ops leave op_pre empty and store
  // their output in op_post.
  std::vector<std::vector<Matrix>> op_pre;
  std::vector<std::vector<Matrix>> op_post;
  std::vector<Matrix> cell_outputs;
  Matrix head_pre;
  Matrix output;
};

struct SupernetGradients {
  Vector arch;     // aligned with ArchParams()
  Vector weights;  // aligned with WeightParams()
  Matrix input;
};

// Searchable network: each cell outputs sum_o softmax(alpha)_o * op_o(h).
class Supernet {
 public:
  Supernet() = default;
  // Throws ContractError if a cell has fewer than two candidates or the
  // widths do not chain.
  Supernet(std::vector<Cell> cells, std::optional<nn::Layer> head);

  static Supernet Random(const SupernetSpec& spec, Rng& rng);

  int input_dim() const { return cells_.front().in_dim; }
  int output_dim() const;
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int arch_count() const;
  int weight_count() const;
  const std::vector<Cell>& cells() const { return cells_; }
  const std::optional<nn::Layer>& head() const { return head_; }

  Vector ArchParams() const;
  void SetArchParams(const Vector& alpha);
  Vector WeightParams() const;
  void SetWeightParams(const Vector& weights);

  // softmax(alpha_cell); throws NumericError on non-finite alpha.
  Vector CellProbabilities(int cell) const;

  Matrix MixedForward(const Matrix& x) const;
  SupernetTrace Trace(const Matrix& x) const;
  SupernetGradients Backward(const SupernetTrace& trace,
                             const Matrix& output_grad) const;

  // Concrete network for a choice; identity candidates become W = I layers,
  // so every extracted network has one layer per cell (plus the head).
  nn::Network Extract(const ArchChoice& choice) const;
  // Argmax candidate per cell, lowest index on ties.
  ArchChoice ArgmaxChoice() const;
  nn::Network Discretize() const { return Extract(ArgmaxChoice()); }

  friend bool operator==(const Supernet&, const Supernet&) = default;

 private:
  std::vector<Cell> cells_;
  std::optional<nn::Layer> head_;
};

Vector ArchGrad(const Supernet& net, const Matrix& x, const nn::Loss& loss);
Vector WeightGrad(const Supernet& net, const Matrix& x, const nn::Loss& loss);

// Product over cells of the softmax probability of the chosen candidate.
double ChoiceProbability(const Supernet& net, const ArchChoice& choice);

// The k most probable architectures by exact enumeration, most probable
// first; equal probabilities keep lexicographic enumeration order (cell 0
// varies slowest). Returns every combination when k exceeds their number.
std::vector<ArchChoice> SampleTopK(const Supernet& net, int k);

// Index of the candidate with the smallest loss; first on ties.
int SelectByLoss(const std::vector<nn::Network>& candidates,
                 const std::function<double(const nn::Network&)>& loss);

}  // namespace donas::nas

#endif  // DONAS_SUPERNET_H_
