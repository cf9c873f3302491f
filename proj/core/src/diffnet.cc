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

#include "donas/diffnet.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace donas::nn {
namespace {

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Clamped probability and the derivative of the clamp (0 when it binds).
std::pair<double, double> ClampProb(double p) {
  if (p < kProbClamp) return {kProbClamp, 0.0};
  if (p > 1.0 - kProbClamp) return {1.0 - kProbClamp, 0.0};
  return {p, 1.0};
}

void CheckFinite(const Matrix& m, const char* what, int layer) {
  if (!m.allFinite()) {
    std::ostringstream os;
    os << "non-finite " << what << " in layer " << layer;
    throw NumericError(os.str());
  }
}

}  // namespace

std::string_view ActivationName(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kRelu: return "relu";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

Activation ParseActivation(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw InputError("unknown activation '" + std::string(name) + "'");
}

Matrix Activate(Activation a, const Matrix& pre) {
  switch (a) {
    case Activation::kIdentity: return pre;
    case Activation::kTanh: return pre.array().tanh().matrix();
    case Activation::kRelu: return pre.cwiseMax(0.0);
    case Activation::kSigmoid: return pre.unaryExpr(&Sigmoid);
  }
  return pre;
}

Matrix ActivationBackward(Activation a, const Matrix& pre, const Matrix& post,
                          const Matrix& upstream) {
  switch (a) {
    case Activation::kIdentity:
      return upstream;
    case Activation::kTanh:
      return (upstream.array() * (1.0 - post.array().square())).matrix();
    case Activation::kRelu:
      return (upstream.array() * (pre.array() > 0.0).cast<double>()).matrix();
    case Activation::kSigmoid:
      return (upstream.array() * post.array() * (1.0 - post.array())).matrix();
  }
  return upstream;
}

Layer GlorotLayer(int in_dim, int out_dim, Activation activation, Rng& rng) {
  DONAS_REQUIRE(in_dim > 0 && out_dim > 0, "GlorotLayer: dimensions must be positive");
  const double a = std::sqrt(6.0 / (in_dim + out_dim));
  Layer layer;
  layer.weight = rng.UniformMatrix(out_dim, in_dim, -a, a);
  layer.bias = Vector::Zero(out_dim);
  layer.activation = activation;
  return layer;
}

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  DONAS_REQUIRE(!layers_.empty(), "Network needs at least one layer");
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    DONAS_REQUIRE(layer.bias.size() == layer.out_dim(),
                  "Network: bias length does not match layer output");
    if (l > 0) {
      DONAS_REQUIRE(layer.in_dim() == layers_[l - 1].out_dim(),
                    "Network: adjacent layer dimensions do not chain");
    }
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
      throw InputError("Network: non-finite parameter in layer " +
                       std::to_string(l));
    }
  }
}

Network Network::Random(int input_dim, const std::vector<LayerSpec>& specs,
                        Rng& rng) {
  std::vector<Layer> layers;
  int in = input_dim;
  for (const LayerSpec& spec : specs) {
    layers.push_back(GlorotLayer(in, spec.out_dim, spec.activation, rng));
    in = spec.out_dim;
  }
  return Network(std::move(layers));
}

int Network::param_count() const {
  int n = 0;
  for (const Layer& l : layers_) n += l.param_count();
  return n;
}

Vector Network::Params() const {
  Vector p(param_count());
  int k = 0;
  for (const Layer& l : layers_) {
    for (int r = 0; r < l.weight.rows(); ++r)
      for (int c = 0; c < l.weight.cols(); ++c) p[k++] = l.weight(r, c);
    for (int r = 0; r < l.bias.size(); ++r) p[k++] = l.bias[r];
  }
  return p;
}

void Network::SetParams(const Vector& params) {
  DONAS_REQUIRE(params.size() == param_count(),
                "Network::SetParams: length does not match param_count");
  int k = 0;
  for (Layer& l : layers_) {
    for (int r = 0; r < l.weight.rows(); ++r)
      for (int c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = params[k++];
    for (int r = 0; r < l.bias.size(); ++r) l.bias[r] = params[k++];
  }
}

Matrix Network::Forward(const Matrix& x) const {
  DONAS_REQUIRE(x.cols() == input_dim(), "Network::Forward: input dimension mismatch");
  if (!x.allFinite()) throw InputError("Network::Forward: non-finite input");
  Matrix h = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    Matrix pre = (h * layer.weight.transpose()).rowwise() + layer.bias.transpose();
    h = Activate(layer.activation, pre);
    CheckFinite(h, "activation", static_cast<int>(l));
  }
  return h;
}

ForwardTrace Network::Trace(const Matrix& x) const {
  DONAS_REQUIRE(x.cols() == input_dim(), "Network::Trace: input dimension mismatch");
  if (!x.allFinite()) throw InputError("Network::Trace: non-finite input");
  ForwardTrace trace;
  trace.inputs.reserve(layers_.size());
  trace.pre.reserve(layers_.size());
  trace.post.reserve(layers_.size());
  const Matrix* h = &x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    trace.inputs.push_back(*h);
    trace.pre.push_back(
        (*h * layer.weight.transpose()).rowwise() + layer.bias.transpose());
    trace.post.push_back(Activate(layer.activation, trace.pre.back()));
    CheckFinite(trace.post.back(), "activation", static_cast<int>(l));
    h = &trace.post.back();
  }
  return trace;
}

Gradients Network::Backward(const ForwardTrace& trace,
                            const Matrix& output_grad) const {
  DONAS_REQUIRE(trace.post.size() == layers_.size(),
                "Network::Backward: trace does not belong to this network");
  DONAS_REQUIRE(output_grad.rows() == trace.output().rows() &&
                    output_grad.cols() == trace.output().cols(),
                "Network::Backward: output gradient shape mismatch");
  Gradients g;
  g.params.resize(param_count());
  // Offsets of each layer's block in the flat vector.
  std::vector<int> offset(layers_.size());
  int k = 0;
  for (size_t l = 0; l < layers_.size(); ++l) {
    offset[l] = k;
    k += layers_[l].param_count();
  }
  Matrix upstream = output_grad;
  for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
    const Layer& layer = layers_[l];
    const Matrix delta = ActivationBackward(layer.activation, trace.pre[l],
                                            trace.post[l], upstream);
    const Matrix grad_w = delta.transpose() * trace.inputs[l];
    const Vector grad_b = delta.colwise().sum().transpose();
    CheckFinite(grad_w, "weight gradient", l);
    int p = offset[l];
    for (int r = 0; r < grad_w.rows(); ++r)
      for (int c = 0; c < grad_w.cols(); ++c) g.params[p++] = grad_w(r, c);
    for (int r = 0; r < grad_b.size(); ++r) g.params[p++] = grad_b[r];
    upstream = delta * layer.weight;
  }
  g.input = std::move(upstream);
  return g;
}

Vector PerExampleLoss(const Loss& loss, const Matrix& output) {
  const int n = static_cast<int>(output.rows());
  Vector per(n);
  switch (loss.kind) {
    case LossKind::kCrossEntropy: {
      DONAS_REQUIRE(static_cast<int>(loss.labels.size()) == n,
                    "cross-entropy: one label per row required");
      for (int i = 0; i < n; ++i) {
        const int y = loss.labels[i];
        DONAS_REQUIRE(y >= 0 && y < output.cols(), "cross-entropy: label out of range");
        const double mx = output.row(i).maxCoeff();
        const double lse = mx + std::log((output.row(i).array() - mx).exp().sum());
        per[i] = lse - output(i, y);
      }
      break;
    }
    case LossKind::kSquaredError:
      DONAS_REQUIRE(loss.targets.rows() == n && loss.targets.cols() == output.cols(),
                    "squared error: target shape mismatch");
      per = 0.5 * (output - loss.targets).rowwise().squaredNorm();
      break;
    case LossKind::kLinearOutput:
      per = output.rowwise().sum();
      break;
    case LossKind::kBinaryCrossEntropy:
      DONAS_REQUIRE(static_cast<int>(loss.labels.size()) == n,
                    "binary cross-entropy: one label per row required");
      for (int i = 0; i < n; ++i) {
        const double p = ClampProb(output(i, 0)).first;
        per[i] = loss.labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
      }
      break;
    case LossKind::kLogProb:
      for (int i = 0; i < n; ++i) per[i] = std::log(ClampProb(output(i, 0)).first);
      break;
    case LossKind::kLogOneMinusProb:
      for (int i = 0; i < n; ++i)
        per[i] = std::log(1.0 - ClampProb(output(i, 0)).first);
      break;
  }
  return loss.scale * per;
}

LossEval EvaluateLoss(const Loss& loss, const Matrix& output) {
  const int n = static_cast<int>(output.rows());
  DONAS_REQUIRE(n > 0, "EvaluateLoss: empty batch");
  LossEval out;
  out.value = PerExampleLoss(loss, output).sum() / n;
  out.output_grad = Matrix::Zero(output.rows(), output.cols());
  const double w = loss.scale / n;
  switch (loss.kind) {
    case LossKind::kCrossEntropy:
      for (int i = 0; i < n; ++i) {
        const double mx = output.row(i).maxCoeff();
        Eigen::RowVectorXd e = (output.row(i).array() - mx).exp().matrix();
        e /= e.sum();
        e[loss.labels[i]] -= 1.0;
        out.output_grad.row(i) = w * e;
      }
      break;
    case LossKind::kSquaredError:
      out.output_grad = w * (output - loss.targets);
      break;
    case LossKind::kLinearOutput:
      out.output_grad.setConstant(w);
      break;
    case LossKind::kBinaryCrossEntropy:
      for (int i = 0; i < n; ++i) {
        const auto [p, dp] = ClampProb(output(i, 0));
        out.output_grad(i, 0) =
            w * dp * (loss.labels[i] == 1 ? -1.0 / p : 1.0 / (1.0 - p));
      }
      break;
    case LossKind::kLogProb:
      for (int i = 0; i < n; ++i) {
        const auto [p, dp] = ClampProb(output(i, 0));
        out.output_grad(i, 0) = w * dp / p;
      }
      break;
    case LossKind::kLogOneMinusProb:
      for (int i = 0; i < n; ++i) {
        const auto [p, dp] = ClampProb(output(i, 0));
        out.output_grad(i, 0) = -w * dp / (1.0 - p);
      }
      break;
  }
  return out;
}

double LossValue(const Network& net, const Matrix& x, const Loss& loss) {
  return EvaluateLoss(loss, net.Forward(x)).value;
}

Vector GradParams(const Network& net, const Matrix& x, const Loss& loss) {
  const ForwardTrace trace = net.Trace(x);
  return net.Backward(trace, EvaluateLoss(loss, trace.output()).output_grad).params;
}

Matrix GradInput(const Network& net, const Matrix& x, const Loss& loss) {
  const ForwardTrace trace = net.Trace(x);
  return net.Backward(trace, EvaluateLoss(loss, trace.output()).output_grad).input;
}

std::string_view OptimizerName(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimState OptimState::Sgd(double lr, Direction dir) {
  OptimState s;
  s.kind = OptimizerKind::kSgd;
  s.learning_rate = lr;
  s.direction = dir;
  return s;
}

OptimState OptimState::Adam(double lr, Direction dir) {
  OptimState s;
  s.kind = OptimizerKind::kAdam;
  s.learning_rate = lr;
  s.direction = dir;
  return s;
}

void ApplyStep(Vector& params, const Vector& grad, OptimState& opt) {
  DONAS_REQUIRE(params.size() == grad.size(), "ApplyStep: gradient length mismatch");
  DONAS_REQUIRE(opt.learning_rate >= 0.0, "ApplyStep: negative learning rate");
  if (!grad.allFinite()) throw NumericError("ApplyStep: non-finite gradient");
  const double sign = opt.direction == Direction::kDescent ? -1.0 : 1.0;
  if (opt.kind == OptimizerKind::kSgd) {
    params += (sign * opt.learning_rate) * grad;
    return;
  }
  if (opt.m.size() == 0) {
    opt.m = Vector::Zero(params.size());
    opt.v = Vector::Zero(params.size());
  }
  DONAS_REQUIRE(opt.m.size() == params.size(), "ApplyStep: Adam moments length mismatch");
  opt.t += 1;
  opt.m = opt.beta1 * opt.m + (1.0 - opt.beta1) * grad;
  opt.v = opt.beta2 * opt.v + (1.0 - opt.beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.t));
  const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.t));
  for (int i = 0; i < params.size(); ++i) {
    const double m_hat = opt.m[i] / bc1;
    const double v_hat = opt.v[i] / bc2;
    params[i] += sign * opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.eps);
  }
}

Network Step(Network net, const Vector& grad, OptimState& opt) {
  Vector p = net.Params();
  ApplyStep(p, grad, opt);
  net.SetParams(p);
  return net;
}

}  // namespace donas::nn
