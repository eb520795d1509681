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

#include "securesgd/secure_sgd.h"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace securesgd {
namespace {

Batch GatherBatch(const Dataset& data, const std::vector<int>& indices) {
  Batch batch;
  batch.m = static_cast<int>(indices.size());
  batch.d = data.d;
  batch.num_classes = data.num_classes;
  batch.inputs.resize(static_cast<std::size_t>(batch.m) * batch.d);
  batch.labels.assign(
      static_cast<std::size_t>(batch.m) * batch.num_classes, 0.0);
  for (int i = 0; i < batch.m; ++i) {
    std::span<const double> row = data.Input(indices[i]);
    std::copy(row.begin(), row.end(),
              batch.inputs.begin() + static_cast<std::size_t>(i) * batch.d);
    batch.labels[static_cast<std::size_t>(i) * batch.num_classes +
                 data.labels[indices[i]]] = 1.0;
  }
  return batch;
}

double L2Norm(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

// Base sigma of the robustness noise at mu = 1 for the configured mechanism.
double GammaBaseSigma(GammaMechanism mechanism, const PrivacyParams& budget,
                      double delta_f) {
  switch (mechanism) {
    case GammaMechanism::kHgm:
    case GammaMechanism::kExtended:
      return CalibrateSigmaR(budget.epsilon, budget.delta, delta_f, 1.0);
    case GammaMechanism::kAgm:
      return CalibrateAnalytic(budget, delta_f);
  }
  throw std::logic_error("unknown gamma mechanism");
}

}  // namespace

std::string GammaMechanismName(GammaMechanism m) {
  switch (m) {
    case GammaMechanism::kHgm: return "hgm";
    case GammaMechanism::kAgm: return "agm";
    case GammaMechanism::kExtended: return "extended";
  }
  throw std::logic_error("unknown gamma mechanism");
}

GammaMechanism GammaMechanismFromName(const std::string& name) {
  if (name == "hgm") return GammaMechanism::kHgm;
  if (name == "agm") return GammaMechanism::kAgm;
  if (name == "extended") return GammaMechanism::kExtended;
  throw std::invalid_argument("unknown gamma mechanism: " + name);
}

void TrainConfig::Validate() const {
  arch.Validate();
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (!(clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be > 0");
  if (!(grad_noise_scale >= 0.0)) {
    throw std::invalid_argument("grad_noise_scale must be >= 0");
  }
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(inflation_rate >= 0.0)) {
    throw std::invalid_argument("inflation_rate must be >= 0");
  }
}

std::vector<double> TrainedModel::FrozenGamma() const {
  if (!gamma_enabled) {
    return std::vector<double>(model.arch().H1Size(), 0.0);
  }
  Rng stream(gamma_seed);
  return SampleNoise(gamma_spec, stream);
}

RedistributionVector ComputeRedistribution(const Model& pretrained,
                                           const Dataset& data, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  const int k = pretrained.arch().H1Size();
  const int n = data.train_count;
  if (n < 1) throw std::invalid_argument("empty training split");
  std::vector<double> s(k, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::vector<double> y = OneHot(data.labels[i], data.num_classes);
    const std::vector<double> g = H1Gradient(pretrained, data.Input(i), y);
    for (int j = 0; j < k; ++j) {
      s[j] += std::pow(std::fabs(g[j]), beta);
    }
  }
  double total = 0.0;
  for (double& v : s) {
    v /= n;
    total += v;
  }
  if (total <= 0.0) {
    // Degenerate gradients; fall back to uniform redistribution.
    return RedistributionVector::Uniform(k);
  }
  for (double& v : s) v /= total;
  // Floor at half the uniform weight.  The r-weighted sensitivity divides by
  // K r_k, so a unit with a vanishing forward derivative (dead ReLU) would
  // otherwise blow up delta_f and with it the calibrated noise scale.  The
  // floor caps that factor at 2 and keeps the ordering of the remaining mass.
  const double floor_weight = 0.5 / k;
  bool floored = false;
  for (double& v : s) {
    if (v < floor_weight) {
      v = floor_weight;
      floored = true;
    }
  }
  if (floored) {
    double renorm = std::accumulate(s.begin(), s.end(), 0.0);
    for (double& v : s) v /= renorm;
  }
  return RedistributionVector(std::move(s));
}

Model Pretrain(const TrainConfig& config, const Dataset& data) {
  config.Validate();
  Rng root(config.seed);
  Rng stream = root.Split(TrainStreams::kPretrain);
  Rng init_rng = stream.Split(0);
  Rng batch_rng = stream.Split(1);
  Model model = Model::RandomInit(config.arch, init_rng);
  const int n = data.train_count;
  std::vector<int> indices(config.batch_size);
  for (int t = 0; t < config.pretrain_steps; ++t) {
    for (int& idx : indices) {
      idx = static_cast<int>(batch_rng.NextIndex(n));
    }
    const Batch batch = GatherBatch(data, indices);
    const std::vector<std::vector<double>> grads =
        BatchGradients(model, batch);
    std::vector<double> mean(model.theta().size(), 0.0);
    for (const auto& g : grads) {
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += g[j];
    }
    const double scale = config.pretrain_learning_rate / batch.m;
    for (std::size_t j = 0; j < mean.size(); ++j) {
      model.theta()[j] -= scale * mean[j];
    }
  }
  return model;
}

namespace {

TrainedModel TrainImpl(const TrainConfig& config, const Dataset& data,
                       TrainRecorder* recorder) {
  config.Validate();
  if (data.train_count < 1) throw std::invalid_argument("empty dataset");
  if (data.d != config.arch.InputDim()) {
    throw std::invalid_argument("dataset dimension does not match model");
  }

  const int k = config.arch.H1Size();
  Rng root(config.seed);

  RedistributionVector r = RedistributionVector::Uniform(k);
  double delta_f_calibration = 0.0;
  NoiseSpec gamma_spec;
  gamma_spec.sigma = 0.0;
  gamma_spec.k = k;
  gamma_spec.r = r;

  if (config.gamma_enabled) {
    const Model pretrained = Pretrain(config, data);
    if (config.gamma_mechanism == GammaMechanism::kHgm) {
      r = ComputeRedistribution(pretrained, data, config.inflation_rate);
    }
    delta_f_calibration =
        FirstLayerSensitivity(pretrained, r, config.sensitivity_norm);
    gamma_spec.mechanism = config.gamma_mechanism == GammaMechanism::kAgm
                               ? Mechanism::kAnalytic
                               : Mechanism::kHeterogeneous;
    gamma_spec.sigma = GammaBaseSigma(config.gamma_mechanism,
                                      config.robustness, delta_f_calibration);
    gamma_spec.sensitivity = delta_f_calibration;
    gamma_spec.r = r;
    gamma_spec.k = k;
    if (gamma_spec.mechanism == Mechanism::kAnalytic) {
      // Flat per-component noise; keep the uniform redistribution explicit.
      gamma_spec.r = RedistributionVector::Uniform(k);
    }
  }

  Rng gamma_rng = root.Split(TrainStreams::kGamma);
  std::vector<double> gamma(k, 0.0);
  if (config.gamma_enabled) {
    gamma = SampleNoise(gamma_spec, gamma_rng);
  }

  Rng init_rng = root.Split(TrainStreams::kInit);
  Rng batch_rng = root.Split(TrainStreams::kBatch);
  Rng noise_rng = root.Split(TrainStreams::kGradNoise);
  Model model = Model::RandomInit(config.arch, init_rng);

  const int n = data.train_count;
  const int m = config.batch_size;
  const double noise_std = config.grad_noise_scale * config.clip_norm;
  std::vector<int> indices(m);

  for (int t = 0; t < config.steps; ++t) {
    if (config.gamma_enabled && config.gamma_redraw_per_step) {
      gamma = SampleNoise(gamma_spec, gamma_rng);
    }
    if (recorder && recorder->record_gamma) {
      recorder->gamma_per_step.push_back(gamma);
    }
    for (int& idx : indices) {
      idx = static_cast<int>(batch_rng.NextIndex(n));
    }
    const Batch batch = GatherBatch(data, indices);
    std::vector<std::vector<double>> grads =
        BatchGradients(model, batch, gamma);

    // Clip each per-example gradient to l2 norm C, then sum in example
    // order (the parallel fan-out above never changes the merge order).
    std::vector<double> summed(model.theta().size(), 0.0);
    std::vector<double> clipped_norms;
    if (recorder && recorder->record_clipped_norms) {
      clipped_norms.reserve(m);
    }
    double loss_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      std::vector<double>& g = grads[i];
      const double norm = L2Norm(g);
      const double divisor = std::max(1.0, norm / config.clip_norm);
      for (double& v : g) v /= divisor;
      if (recorder && recorder->record_clipped_norms) {
        clipped_norms.push_back(L2Norm(g));
      }
      for (std::size_t j = 0; j < summed.size(); ++j) summed[j] += g[j];
    }
    if (recorder && recorder->record_clipped_norms) {
      recorder->clipped_norms.push_back(std::move(clipped_norms));
    }
    if (recorder && recorder->record_loss) {
      for (int i = 0; i < m; ++i) {
        loss_sum +=
            CrossEntropyLoss(model, batch.Input(i), batch.Label(i), gamma);
      }
      recorder->mean_loss.push_back(loss_sum / m);
    }

    std::vector<double> noise(summed.size());
    for (double& v : noise) v = noise_std * noise_rng.NextGaussian();
    if (recorder && recorder->record_grad_noise) {
      std::vector<double> scaled(noise.size());
      for (std::size_t j = 0; j < noise.size(); ++j) scaled[j] = noise[j] / m;
      recorder->grad_noise.push_back(std::move(scaled));
    }

    const double lr = config.learning_rate;
    bool finite = true;
    for (std::size_t j = 0; j < summed.size(); ++j) {
      const double update = (summed[j] + noise[j]) / m;
      model.theta()[j] -= lr * update;
      finite = finite && std::isfinite(model.theta()[j]);
    }
    if (!finite) {
      throw std::runtime_error("training diverged (non-finite parameters) at step " +
                               std::to_string(t));
    }
  }

  TrainedModel out{.model = std::move(model)};
  out.gamma_enabled = config.gamma_enabled;
  out.gamma_spec = gamma_spec;
  out.gamma_seed = gamma_rng.seed();
  out.r = r;
  out.delta_f_calibration = delta_f_calibration;
  out.sensitivity_norm = config.sensitivity_norm;
  out.robustness_budget = config.robustness;
  out.accounting = AccountingRecord{
      .noise_scale = config.grad_noise_scale,
      .clip_norm = config.clip_norm,
      .sample_rate = static_cast<double>(m) / n,
      .steps = config.steps,
  };
  out.train_seed = config.seed;
  // Certification must bound the deployed first layer, so the sensitivity is
  // recomputed on the final weights.
  out.delta_f = config.gamma_enabled
                    ? FirstLayerSensitivity(out.model, r, config.sensitivity_norm)
                    : 0.0;
  return out;
}

}  // namespace

TrainedModel Train(const TrainConfig& config, const Dataset& data,
                   TrainRecorder* recorder) {
  return TrainImpl(config, data, recorder);
}

TrainedModel TrainDpsgdBaseline(const TrainConfig& config, const Dataset& data,
                                TrainRecorder* recorder) {
  TrainConfig baseline = config;
  baseline.gamma_enabled = false;
  return TrainImpl(baseline, data, recorder);
}

}  // namespace securesgd
