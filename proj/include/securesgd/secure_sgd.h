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

#ifndef SECURESGD_SECURE_SGD_H_
#define SECURESGD_SECURE_SGD_H_

#include <cstdint>
#include <vector>

#include "securesgd/dataset.h"
#include "securesgd/mechanisms.h"
#include "securesgd/network.h"
#include "securesgd/robustness.h"
#include "securesgd/rng.h"

namespace securesgd {

enum class GammaMechanism { kHgm, kAgm, kExtended };
std::string GammaMechanismName(GammaMechanism m);
GammaMechanism GammaMechanismFromName(const std::string& name);

// Derived RNG streams used by Train().  Splitting by purpose keeps the
// trajectory identical whether or not optional stages (pretraining, the
// gamma draw) run, and lets an external replay reproduce it exactly.
struct TrainStreams {
  static constexpr std::uint64_t kInit = 0;      // parameter initialization
  static constexpr std::uint64_t kGamma = 1;     // robustness noise draw(s)
  static constexpr std::uint64_t kBatch = 2;     // batch index sampling
  static constexpr std::uint64_t kGradNoise = 3; // gradient noise
  static constexpr std::uint64_t kPretrain = 4;  // preprocessing run
};

struct TrainConfig {
  Architecture arch;
  int batch_size = 32;              // m
  double learning_rate = 1.5;       // xi
  double clip_norm = 1.0;           // C
  double grad_noise_scale = 1.0;    // sigma (DP-SGD noise multiplier)
  PrivacyParams data_privacy{1.0, 1e-5};
  PrivacyParams robustness{1.0, 1e-5};  // (eps_r, delta_r)
  double inflation_rate = 1.0;      // beta for the redistribution vector
  int steps = 100;                  // T
  std::uint64_t seed = 0;
  GammaMechanism gamma_mechanism = GammaMechanism::kHgm;
  bool gamma_enabled = true;
  // Algorithm fidelity: gamma is drawn once before the loop.  When true,
  // gamma is redrawn every step instead (the usual randomized-smoothing
  // training regime); certification always uses fresh draws either way.
  bool gamma_redraw_per_step = false;
  NormKind sensitivity_norm = NormKind::kLinf;
  int pretrain_steps = 200;
  double pretrain_learning_rate = 0.5;

  void Validate() const;
};

struct AccountingRecord {
  double noise_scale = 0.0;   // sigma
  double clip_norm = 0.0;     // C
  double sample_rate = 0.0;   // m / n
  int steps = 0;              // T
};

struct TrainedModel {
  Model model;
  bool gamma_enabled = false;
  NoiseSpec gamma_spec;            // sigma_r, r, K of the robustness noise
  std::uint64_t gamma_seed = 0;    // stream that produced the frozen gamma
  RedistributionVector r = RedistributionVector::Uniform(1);
  // Certification sensitivity, computed on the final first layer.
  double delta_f = 0.0;
  // Sensitivity of the preprocessing model that sigma_r was calibrated from.
  double delta_f_calibration = 0.0;
  NormKind sensitivity_norm = NormKind::kLinf;
  PrivacyParams robustness_budget{1.0, 1e-5};
  AccountingRecord accounting;
  std::uint64_t train_seed = 0;

  // The gamma vector used at training time, regenerated from its stream.
  std::vector<double> FrozenGamma() const;
};

// Optional instrumentation; all recording is off by default.
struct TrainRecorder {
  bool record_clipped_norms = false;
  bool record_grad_noise = false;
  bool record_gamma = false;
  bool record_loss = false;
  std::vector<std::vector<double>> clipped_norms;  // per step, per example
  std::vector<std::vector<double>> grad_noise;     // per step, per coordinate
  std::vector<std::vector<double>> gamma_per_step;
  std::vector<double> mean_loss;                   // per step
};

// Redistribution vector: s = (1/n) sum_x |dL/dh1(x)|^beta elementwise
// over the training split, r = s / sum(s).  All-zero s falls back to the
// uniform vector.
RedistributionVector ComputeRedistribution(const Model& pretrained,
                                           const Dataset& data, double beta);

// Plain SGD preprocessing run (no clipping, no noise, no gamma) used to
// derive r and the calibration sensitivity.
Model Pretrain(const TrainConfig& config, const Dataset& data);

// Secure-SGD training loop: draw gamma once, then per step sample a batch
// with replacement, perturb h1 with gamma, clip per-example gradients to C,
// average with N(0, sigma^2 C^2 I) noise and descend.
TrainedModel Train(const TrainConfig& config, const Dataset& data,
                   TrainRecorder* recorder = nullptr);

// DPSGD baseline: identical loop with gamma forced to zero.  The result is
// not certifiable downstream.
TrainedModel TrainDpsgdBaseline(const TrainConfig& config, const Dataset& data,
                                TrainRecorder* recorder = nullptr);

}  // namespace securesgd

#endif  // SECURESGD_SECURE_SGD_H_
