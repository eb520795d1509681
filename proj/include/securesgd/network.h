//
// Copyright 2026 SecureSGD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef SECURESGD_NETWORK_H_
#define SECURESGD_NETWORK_H_

#include <optional>
#include <span>
#include <vector>

#include "securesgd/rng.h"

namespace securesgd {

// Single valid-padding 2-D convolution.  Input layout is channel-major
// [c][y][x]; output layout [out_c][oy][ox].
struct ConvSpec {
  int in_h = 0, in_w = 0, in_c = 0;
  int out_c = 0, k_h = 0, k_w = 0, stride = 1;

  int OutH() const { return (in_h - k_h) / stride + 1; }
  int OutW() const { return (in_w - k_w) / stride + 1; }
  int OutSize() const { return out_c * OutH() * OutW(); }
  int InSize() const { return in_c * in_h * in_w; }
  int WeightCount() const { return out_c * in_c * k_h * k_w; }
  int ParamCount() const { return WeightCount() + out_c; }
};

struct DenseSpec {
  int in = 0, out = 0;
};

// Feedforward scorer: an optional conv first layer, then a dense stack.
// ReLU between layers, softmax over the last layer's outputs.  When the
// model is a single dense layer, that layer is both the first hidden layer
// and the score layer.
struct Architecture {
  std::optional<ConvSpec> conv;
  std::vector<DenseSpec> dense;

  int InputDim() const;
  int H1Size() const;  // size of the first hidden pre-activation
  int NumClasses() const { return dense.back().out; }
  int ParamCount() const;
  void Validate() const;
};

// Parameters live in one flat vector laid out as
//   [conv weights][conv bias][dense0 W][dense0 b][dense1 W][dense1 b]...
// Dense weights are row-major with rows indexed by inputs: W[i*out + o],
// so a layer computes h = W^T x + b.
class Model {
 public:
  explicit Model(Architecture arch);
  static Model RandomInit(const Architecture& arch, Rng& rng);

  const Architecture& arch() const { return arch_; }
  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }

  std::span<double> DenseW(int layer);
  std::span<const double> DenseW(int layer) const;
  std::span<double> DenseB(int layer);
  std::span<const double> DenseB(int layer) const;
  std::span<double> ConvW();
  std::span<const double> ConvW() const;
  std::span<double> ConvB();
  std::span<const double> ConvB() const;

  bool HasFiniteParams() const;

  // The first layer as an explicit d x K matrix (row-major, rows = input
  // coordinates).  For a conv first layer this unrolls the kernel; the
  // column_channel vector then maps each column to its feature map.
  struct FirstLayerMatrix {
    int d = 0, k = 0;
    std::vector<double> w;            // d x k row-major
    std::vector<int> column_channel;  // size k; all zero for dense
    int num_channels = 1;
  };
  FirstLayerMatrix UnrolledFirstLayer() const;

 private:
  Architecture arch_;
  std::vector<double> theta_;
  std::vector<int> dense_w_offset_;
  std::vector<int> dense_b_offset_;
  int conv_w_offset_ = 0;
  int conv_b_offset_ = 0;
};

struct ForwardResult {
  std::vector<double> scores;  // softmax probabilities, size NumClasses
  std::vector<double> h1_pre;  // first hidden pre-activation (noise included)
};

// First hidden pre-activation is W1^T x + b1 + h1_noise (noise omitted when
// empty); remaining layers are standard.
ForwardResult Forward(const Model& model, std::span<const double> x,
                      std::span<const double> h1_noise = {});

struct BackpropResult {
  double loss = 0.0;                // categorical cross-entropy
  std::vector<double> scores;
  std::vector<double> param_grad;   // same layout as Model::theta()
  std::vector<double> input_grad;   // dL/dx
  std::vector<double> h1_grad;      // dL/d h1_pre
};

BackpropResult Backprop(const Model& model, std::span<const double> x,
                        std::span<const double> y_onehot,
                        std::span<const double> h1_noise = {});

// Single-quantity accessors over Backprop.
std::vector<double> PerExampleGradient(const Model& model,
                                       std::span<const double> x,
                                       std::span<const double> y_onehot,
                                       std::span<const double> h1_noise = {});
std::vector<double> InputGradient(const Model& model,
                                  std::span<const double> x,
                                  std::span<const double> y_onehot,
                                  std::span<const double> h1_noise = {});
std::vector<double> H1Gradient(const Model& model, std::span<const double> x,
                               std::span<const double> y_onehot);

double CrossEntropyLoss(const Model& model, std::span<const double> x,
                        std::span<const double> y_onehot,
                        std::span<const double> h1_noise = {});

std::vector<double> OneHot(int label, int num_classes);
int ArgMax(std::span<const double> v);

// Mini-batch with inputs clamped to [-1, 1] and one-hot labels.
struct Batch {
  int m = 0, d = 0, num_classes = 0;
  std::vector<double> inputs;  // m x d row-major
  std::vector<double> labels;  // m x num_classes one-hot

  std::span<const double> Input(int i) const;
  std::span<const double> Label(int i) const;
};

// Per-example gradients for a whole batch, all with the same h1 noise.
// Rows are computed independently (OpenMP when `parallel`) and callers merge
// in example order, so the result never depends on thread count.
std::vector<std::vector<double>> BatchGradients(
    const Model& model, const Batch& batch,
    std::span<const double> h1_noise = {}, bool parallel = true);

}  // namespace securesgd

#endif  // SECURESGD_NETWORK_H_
