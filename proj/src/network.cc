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

#include "securesgd/network.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace securesgd {
namespace {

void CheckSpan(std::span<const double> v, int expected, const char* what) {
  if (static_cast<int>(v.size()) != expected) {
    throw std::invalid_argument(std::string(what) + ": size mismatch");
  }
}

// Softmax via log-sum-exp.
std::vector<double> Softmax(std::span<const double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

struct LayerCache {
  // pre[l] is the pre-activation of layer l; act[l] its post-ReLU output
  // (act of the last layer is unused, the softmax head reads pre directly).
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

void ConvForward(const ConvSpec& c, std::span<const double> w,
                 std::span<const double> b, std::span<const double> x,
                 std::vector<double>& out) {
  const int oh = c.OutH(), ow = c.OutW();
  out.assign(c.OutSize(), 0.0);
  for (int oc = 0; oc < c.out_c; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = b[oc];
        for (int ic = 0; ic < c.in_c; ++ic) {
          for (int ky = 0; ky < c.k_h; ++ky) {
            for (int kx = 0; kx < c.k_w; ++kx) {
              const int iy = oy * c.stride + ky;
              const int ix = ox * c.stride + kx;
              acc += w[((oc * c.in_c + ic) * c.k_h + ky) * c.k_w + kx] *
                     x[(ic * c.in_h + iy) * c.in_w + ix];
            }
          }
        }
        out[(oc * oh + oy) * ow + ox] = acc;
      }
    }
  }
}

void ConvBackward(const ConvSpec& c, std::span<const double> w,
                  std::span<const double> x, std::span<const double> dout,
                  std::span<double> dw, std::span<double> db,
                  std::span<double> dx) {
  const int oh = c.OutH(), ow = c.OutW();
  for (int oc = 0; oc < c.out_c; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const double g = dout[(oc * oh + oy) * ow + ox];
        if (g == 0.0) continue;
        db[oc] += g;
        for (int ic = 0; ic < c.in_c; ++ic) {
          for (int ky = 0; ky < c.k_h; ++ky) {
            for (int kx = 0; kx < c.k_w; ++kx) {
              const int iy = oy * c.stride + ky;
              const int ix = ox * c.stride + kx;
              const int wi = ((oc * c.in_c + ic) * c.k_h + ky) * c.k_w + kx;
              const int xi = (ic * c.in_h + iy) * c.in_w + ix;
              dw[wi] += g * x[xi];
              dx[xi] += g * w[wi];
            }
          }
        }
      }
    }
  }
}

LayerCache RunForward(const Model& model, std::span<const double> x,
                      std::span<const double> h1_noise) {
  const Architecture& arch = model.arch();
  CheckSpan(x, arch.InputDim(), "input");
  if (!h1_noise.empty()) CheckSpan(h1_noise, arch.H1Size(), "h1 noise");

  LayerCache cache;
  const int n_layers = (arch.conv ? 1 : 0) + static_cast<int>(arch.dense.size());
  cache.pre.resize(n_layers);
  cache.act.resize(n_layers);

  std::span<const double> cur = x;
  int layer = 0;
  if (arch.conv) {
    ConvForward(*arch.conv, model.ConvW(), model.ConvB(), cur,
                cache.pre[layer]);
    if (!h1_noise.empty()) {
      for (int i = 0; i < arch.conv->OutSize(); ++i) {
        cache.pre[layer][i] += h1_noise[i];
      }
    }
    cache.act[layer].resize(cache.pre[layer].size());
    for (std::size_t i = 0; i < cache.pre[layer].size(); ++i) {
      cache.act[layer][i] = std::max(0.0, cache.pre[layer][i]);
    }
    cur = cache.act[layer];
    ++layer;
  }
  for (std::size_t l = 0; l < arch.dense.size(); ++l, ++layer) {
    const DenseSpec& d = arch.dense[l];
    std::span<const double> w = model.DenseW(static_cast<int>(l));
    std::span<const double> b = model.DenseB(static_cast<int>(l));
    std::vector<double>& pre = cache.pre[layer];
    pre.assign(d.out, 0.0);
    for (int o = 0; o < d.out; ++o) pre[o] = b[o];
    for (int i = 0; i < d.in; ++i) {
      const double xi = cur[i];
      if (xi == 0.0) continue;
      const double* row = w.data() + static_cast<std::size_t>(i) * d.out;
      for (int o = 0; o < d.out; ++o) pre[o] += xi * row[o];
    }
    if (layer == 0 && !h1_noise.empty()) {
      for (int o = 0; o < d.out; ++o) pre[o] += h1_noise[o];
    }
    const bool last = layer == n_layers - 1;
    if (!last) {
      cache.act[layer].resize(pre.size());
      for (std::size_t i = 0; i < pre.size(); ++i) {
        cache.act[layer][i] = std::max(0.0, pre[i]);
      }
      cur = cache.act[layer];
    }
  }
  return cache;
}

}  // namespace

int Architecture::InputDim() const {
  return conv ? conv->InSize() : dense.front().in;
}

int Architecture::H1Size() const {
  return conv ? conv->OutSize() : dense.front().out;
}

int Architecture::ParamCount() const {
  int n = conv ? conv->ParamCount() : 0;
  for (const DenseSpec& d : dense) n += d.in * d.out + d.out;
  return n;
}

void Architecture::Validate() const {
  if (dense.empty()) {
    throw std::invalid_argument("architecture needs at least one dense layer");
  }
  int cur = conv ? conv->OutSize() : dense.front().in;
  if (conv) {
    if (conv->OutH() <= 0 || conv->OutW() <= 0 || conv->stride < 1) {
      throw std::invalid_argument("invalid conv geometry");
    }
    if (dense.front().in != cur) {
      throw std::invalid_argument("conv output does not match dense input");
    }
  }
  for (std::size_t l = 0; l < dense.size(); ++l) {
    if (dense[l].in <= 0 || dense[l].out <= 0) {
      throw std::invalid_argument("dense layer with nonpositive size");
    }
    if (dense[l].in != cur) {
      throw std::invalid_argument("dense layer size mismatch");
    }
    cur = dense[l].out;
  }
}

Model::Model(Architecture arch) : arch_(std::move(arch)) {
  arch_.Validate();
  int off = 0;
  if (arch_.conv) {
    conv_w_offset_ = off;
    off += arch_.conv->WeightCount();
    conv_b_offset_ = off;
    off += arch_.conv->out_c;
  }
  dense_w_offset_.resize(arch_.dense.size());
  dense_b_offset_.resize(arch_.dense.size());
  for (std::size_t l = 0; l < arch_.dense.size(); ++l) {
    dense_w_offset_[l] = off;
    off += arch_.dense[l].in * arch_.dense[l].out;
    dense_b_offset_[l] = off;
    off += arch_.dense[l].out;
  }
  theta_.assign(off, 0.0);
}

Model Model::RandomInit(const Architecture& arch, Rng& rng) {
  Model model(arch);
  if (arch.conv) {
    const double scale =
        1.0 / std::sqrt(static_cast<double>(arch.conv->in_c * arch.conv->k_h *
                                            arch.conv->k_w));
    for (double& w : model.ConvW()) w = scale * rng.NextGaussian();
  }
  for (std::size_t l = 0; l < arch.dense.size(); ++l) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(arch.dense[l].in));
    for (double& w : model.DenseW(static_cast<int>(l))) {
      w = scale * rng.NextGaussian();
    }
  }
  return model;
}

std::span<double> Model::DenseW(int layer) {
  const DenseSpec& d = arch_.dense[layer];
  return {theta_.data() + dense_w_offset_[layer],
          static_cast<std::size_t>(d.in) * d.out};
}
std::span<const double> Model::DenseW(int layer) const {
  const DenseSpec& d = arch_.dense[layer];
  return {theta_.data() + dense_w_offset_[layer],
          static_cast<std::size_t>(d.in) * d.out};
}
std::span<double> Model::DenseB(int layer) {
  return {theta_.data() + dense_b_offset_[layer],
          static_cast<std::size_t>(arch_.dense[layer].out)};
}
std::span<const double> Model::DenseB(int layer) const {
  return {theta_.data() + dense_b_offset_[layer],
          static_cast<std::size_t>(arch_.dense[layer].out)};
}
std::span<double> Model::ConvW() {
  return {theta_.data() + conv_w_offset_,
          static_cast<std::size_t>(arch_.conv->WeightCount())};
}
std::span<const double> Model::ConvW() const {
  return {theta_.data() + conv_w_offset_,
          static_cast<std::size_t>(arch_.conv->WeightCount())};
}
std::span<double> Model::ConvB() {
  return {theta_.data() + conv_b_offset_,
          static_cast<std::size_t>(arch_.conv->out_c)};
}
std::span<const double> Model::ConvB() const {
  return {theta_.data() + conv_b_offset_,
          static_cast<std::size_t>(arch_.conv->out_c)};
}

bool Model::HasFiniteParams() const {
  for (double v : theta_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Model::FirstLayerMatrix Model::UnrolledFirstLayer() const {
  FirstLayerMatrix m;
  m.d = arch_.InputDim();
  m.k = arch_.H1Size();
  m.w.assign(static_cast<std::size_t>(m.d) * m.k, 0.0);
  m.column_channel.assign(m.k, 0);
  if (!arch_.conv) {
    std::span<const double> w = DenseW(0);
    std::copy(w.begin(), w.end(), m.w.begin());
    m.num_channels = 1;
    return m;
  }
  const ConvSpec& c = *arch_.conv;
  const int oh = c.OutH(), ow = c.OutW();
  std::span<const double> w = ConvW();
  for (int oc = 0; oc < c.out_c; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        const int col = (oc * oh + oy) * ow + ox;
        m.column_channel[col] = oc;
        for (int ic = 0; ic < c.in_c; ++ic) {
          for (int ky = 0; ky < c.k_h; ++ky) {
            for (int kx = 0; kx < c.k_w; ++kx) {
              const int row =
                  (ic * c.in_h + oy * c.stride + ky) * c.in_w + ox * c.stride +
                  kx;
              m.w[static_cast<std::size_t>(row) * m.k + col] =
                  w[((oc * c.in_c + ic) * c.k_h + ky) * c.k_w + kx];
            }
          }
        }
      }
    }
  }
  m.num_channels = c.out_c;
  return m;
}

ForwardResult Forward(const Model& model, std::span<const double> x,
                      std::span<const double> h1_noise) {
  LayerCache cache = RunForward(model, x, h1_noise);
  ForwardResult out;
  out.h1_pre = cache.pre.front();
  out.scores = Softmax(cache.pre.back());
  return out;
}

BackpropResult Backprop(const Model& model, std::span<const double> x,
                        std::span<const double> y_onehot,
                        std::span<const double> h1_noise) {
  const Architecture& arch = model.arch();
  CheckSpan(y_onehot, arch.NumClasses(), "label");
  LayerCache cache = RunForward(model, x, h1_noise);

  BackpropResult res;
  res.scores = Softmax(cache.pre.back());
  res.h1_grad.assign(arch.H1Size(), 0.0);
  res.param_grad.assign(arch.ParamCount(), 0.0);
  res.input_grad.assign(arch.InputDim(), 0.0);

  // Cross-entropy on softmax scores; loss = logsumexp(z) - <y, z>.
  {
    const std::vector<double>& z = cache.pre.back();
    const double m = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - m);
    lse = m + std::log(lse);
    double dot = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) dot += y_onehot[i] * z[i];
    res.loss = lse - dot;
  }

  // dz at the softmax head.
  std::vector<double> dz(arch.NumClasses());
  for (int i = 0; i < arch.NumClasses(); ++i) {
    dz[i] = res.scores[i] - y_onehot[i];
  }

  // Walk dense layers top-down.
  std::vector<double> dcur = std::move(dz);
  for (int l = static_cast<int>(arch.dense.size()) - 1; l >= 0; --l) {
    const DenseSpec& d = arch.dense[l];
    const int layer_index = (arch.conv ? 1 : 0) + l;
    std::span<const double> input =
        layer_index == 0
            ? x
            : std::span<const double>(cache.act[layer_index - 1]);
    // Parameter gradients.  Offsets mirror Model's layout.
    int off = arch.conv ? arch.conv->ParamCount() : 0;
    for (int j = 0; j < l; ++j) {
      off += arch.dense[j].in * arch.dense[j].out + arch.dense[j].out;
    }
    double* dw = res.param_grad.data() + off;
    double* db = dw + static_cast<std::size_t>(d.in) * d.out;
    for (int o = 0; o < d.out; ++o) db[o] += dcur[o];
    for (int i = 0; i < d.in; ++i) {
      const double xi = input[i];
      if (xi != 0.0) {
        double* row = dw + static_cast<std::size_t>(i) * d.out;
        for (int o = 0; o < d.out; ++o) row[o] += xi * dcur[o];
      }
    }
    // Gradient w.r.t. this layer's input.
    std::vector<double> dprev(d.in, 0.0);
    std::span<const double> w = model.DenseW(l);
    for (int i = 0; i < d.in; ++i) {
      const double* row = w.data() + static_cast<std::size_t>(i) * d.out;
      double acc = 0.0;
      for (int o = 0; o < d.out; ++o) acc += row[o] * dcur[o];
      dprev[i] = acc;
    }
    if (layer_index == 0) {
      // The first layer is dense: dprev is dL/dx, dcur is dL/d h1_pre.
      res.h1_grad = dcur;
      res.input_grad = std::move(dprev);
      return res;
    }
    // Through the ReLU of the layer below.
    const std::vector<double>& below_pre = cache.pre[layer_index - 1];
    for (std::size_t i = 0; i < dprev.size(); ++i) {
      if (below_pre[i] <= 0.0) dprev[i] = 0.0;
    }
    if (layer_index - 1 == 0) {
      res.h1_grad = dprev;  // pre-activation gradient at h1
    }
    dcur = std::move(dprev);
  }

  // Remaining gradient flows into the conv first layer.
  const ConvSpec& c = *arch.conv;
  std::span<double> dw{res.param_grad.data(),
                       static_cast<std::size_t>(c.WeightCount())};
  std::span<double> db{res.param_grad.data() + c.WeightCount(),
                       static_cast<std::size_t>(c.out_c)};
  ConvBackward(c, model.ConvW(), x, dcur, dw, db, res.input_grad);
  return res;
}

std::vector<double> PerExampleGradient(const Model& model,
                                       std::span<const double> x,
                                       std::span<const double> y_onehot,
                                       std::span<const double> h1_noise) {
  return Backprop(model, x, y_onehot, h1_noise).param_grad;
}

std::vector<double> InputGradient(const Model& model,
                                  std::span<const double> x,
                                  std::span<const double> y_onehot,
                                  std::span<const double> h1_noise) {
  return Backprop(model, x, y_onehot, h1_noise).input_grad;
}

std::vector<double> H1Gradient(const Model& model, std::span<const double> x,
                               std::span<const double> y_onehot) {
  return Backprop(model, x, y_onehot).h1_grad;
}

double CrossEntropyLoss(const Model& model, std::span<const double> x,
                        std::span<const double> y_onehot,
                        std::span<const double> h1_noise) {
  return Backprop(model, x, y_onehot, h1_noise).loss;
}

std::vector<double> OneHot(int label, int num_classes) {
  if (label < 0 || label >= num_classes) {
    throw std::invalid_argument("label out of range");
  }
  std::vector<double> y(num_classes, 0.0);
  y[label] = 1.0;
  return y;
}

int ArgMax(std::span<const double> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::span<const double> Batch::Input(int i) const {
  return {inputs.data() + static_cast<std::size_t>(i) * d,
          static_cast<std::size_t>(d)};
}

std::span<const double> Batch::Label(int i) const {
  return {labels.data() + static_cast<std::size_t>(i) * num_classes,
          static_cast<std::size_t>(num_classes)};
}

std::vector<std::vector<double>> BatchGradients(const Model& model,
                                                const Batch& batch,
                                                std::span<const double> h1_noise,
                                                bool parallel) {
  std::vector<std::vector<double>> grads(batch.m);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < batch.m; ++i) {
    grads[i] =
        Backprop(model, batch.Input(i), batch.Label(i), h1_noise).param_grad;
  }
  return grads;
}

}  // namespace securesgd
