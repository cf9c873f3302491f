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

#ifndef DONAS_DIFFNET_H_
#define DONAS_DIFFNET_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "donas/common.h"
#include "donas/rng.h"

namespace donas::nn {

enum class Activation { kIdentity, kTanh, kRelu, kSigmoid };

std::string_view ActivationName(Activation a);
// Throws InputError for an unknown name.
Activation ParseActivation(std::string_view name);

Matrix Activate(Activation a, const Matrix& pre);
// Chain rule through the activation: upstream * f'(pre). relu'(0) = 0.
Matrix ActivationBackward(Activation a, const Matrix& pre, const Matrix& post,
                          const Matrix& upstream);

// Affine map followed by an activation: f(x W^T + b).
struct Layer {
  Matrix weight;  // out_dim x in_dim
  Vector bias;    // out_dim
  Activation activation = Activation::kIdentity;

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
  int param_count() const { return static_cast<int>(weight.size() + bias.size()); }

  friend bool operator==(const Layer& a, const Layer& b) {
    return a.activation == b.activation && a.weight.rows() == b.weight.rows() &&
           a.weight.cols() == b.weight.cols() && a.weight == b.weight &&
           a.bias == b.bias;
  }
};

// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); zero bias.
Layer GlorotLayer(int in_dim, int out_dim, Activation activation, Rng& rng);

struct LayerSpec {
  int out_dim = 1;
  Activation activation = Activation::kIdentity;
};

// Per-layer values recorded by a forward pass. inputs[l] feeds layer l,
// post[l] is its output; post.back() is the network output.
struct ForwardTrace {
  std::vector<Matrix> inputs;
  std::vector<Matrix> pre;
  std::vector<Matrix> post;

  const Matrix& output() const { return post.back(); }
};

struct Gradients {
  Vector params;  // aligned with Network::Params()
  Matrix input;   // same shape as the forward input
};

// A plain feed-forward network: the pure strategy of a player. Parameters are
// flattened layer by layer, weight (row-major) then bias.
class Network {
 public:
  Network() = default;
  // Throws ContractError if adjacent dimensions do not chain and InputError
  // on a non-finite parameter.
  explicit Network(std::vector<Layer> layers);

  static Network Random(int input_dim, const std::vector<LayerSpec>& specs,
                        Rng& rng);

  bool empty() const { return layers_.empty(); }
  int input_dim() const { return layers_.front().in_dim(); }
  int output_dim() const { return layers_.back().out_dim(); }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  int param_count() const;
  const std::vector<Layer>& layers() const { return layers_; }

  Vector Params() const;
  void SetParams(const Vector& params);

  // x holds one example per row. Throws InputError on non-finite input and
  // NumericError (naming the layer) on a non-finite activation.
  Matrix Forward(const Matrix& x) const;
  ForwardTrace Trace(const Matrix& x) const;
  // Reverse-mode pass for dL/d(output) = output_grad.
  Gradients Backward(const ForwardTrace& trace, const Matrix& output_grad) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<Layer> layers_;
};

// Probabilities inside every log are clamped to [kProbClamp, 1 - kProbClamp].
inline constexpr double kProbClamp = 1e-7;

enum class LossKind {
  kCrossEntropy,        // softmax cross-entropy on logits, labels
  kSquaredError,        // 0.5 * ||out - target||^2
  kLinearOutput,        // sum of outputs
  kBinaryCrossEntropy,  // -[y log p + (1 - y) log(1 - p)], p = out(:, 0)
  kLogProb,             // log p
  kLogOneMinusProb,     // log(1 - p)
};

// A batch objective; every kind is averaged over the rows of the batch and
// multiplied by `scale`.
struct Loss {
  LossKind kind = LossKind::kCrossEntropy;
  std::vector<int> labels;
  Matrix targets;
  double scale = 1.0;
};

struct LossEval {
  double value = 0.0;
  Matrix output_grad;
};

LossEval EvaluateLoss(const Loss& loss, const Matrix& output);
// Per-row loss values (unscaled by 1/n, scaled by loss.scale).
Vector PerExampleLoss(const Loss& loss, const Matrix& output);

double LossValue(const Network& net, const Matrix& x, const Loss& loss);
Vector GradParams(const Network& net, const Matrix& x, const Loss& loss);
Matrix GradInput(const Network& net, const Matrix& x, const Loss& loss);

enum class OptimizerKind { kSgd, kAdam };
enum class Direction { kDescent, kAscent };

std::string_view OptimizerName(OptimizerKind kind);

struct OptimState {
  OptimizerKind kind = OptimizerKind::kAdam;
  double learning_rate = 1e-3;
  Direction direction = Direction::kDescent;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Vector m;
  Vector v;
  int64_t t = 0;

  static OptimState Sgd(double lr, Direction dir = Direction::kDescent);
  static OptimState Adam(double lr, Direction dir = Direction::kDescent);

  friend bool operator==(const OptimState& a, const OptimState& b) {
    return a.kind == b.kind && a.learning_rate == b.learning_rate &&
           a.direction == b.direction && a.beta1 == b.beta1 &&
           a.beta2 == b.beta2 && a.eps == b.eps && a.t == b.t &&
           a.m.size() == b.m.size() && a.m == b.m && a.v.size() == b.v.size() &&
           a.v == b.v;
  }
};

// In-place update of a flat parameter vector. SGD: p -= lr * g (or += for
// ascent). Adam uses bias-corrected first and second moments.
void ApplyStep(Vector& params, const Vector& grad, OptimState& opt);
Network Step(Network net, const Vector& grad, OptimState& opt);

}  // namespace donas::nn

#endif  // DONAS_DIFFNET_H_
