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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "securesgd/dataset.h"
#include "securesgd/network.h"
#include "securesgd/robustness.h"
#include "securesgd/secure_sgd.h"

using namespace securesgd;

namespace {

TrainConfig SmallConfig(const Dataset& data, std::uint64_t seed) {
  TrainConfig config;
  config.arch.dense = {DenseSpec{data.d, 6}, DenseSpec{6, data.num_classes}};
  config.batch_size = 4;
  config.learning_rate = 0.2;
  config.clip_norm = 1.0;
  config.grad_noise_scale = 1.0;
  config.steps = 10;
  config.seed = seed;
  config.pretrain_steps = 30;
  return config;
}

double L2Norm(const std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

// Model with zero first layer, fixed h1 bias (1, 1) and hand-set read-out
// rows, so dL/dh1 magnitudes have a known ratio.
Model HandSetModel(double row0, double row1) {
  Architecture arch;
  arch.dense = {DenseSpec{2, 2}, DenseSpec{2, 2}};
  Model model(arch);
  model.DenseB(0)[0] = 1.0;
  model.DenseB(0)[1] = 1.0;
  model.DenseW(1)[0] = row0;
  model.DenseW(1)[1] = -row0;
  model.DenseW(1)[2] = row1;
  model.DenseW(1)[3] = -row1;
  return model;
}

Dataset TinyDataset() {
  Dataset ds;
  ds.name = "tiny";
  ds.n = 1;
  ds.d = 2;
  ds.num_classes = 2;
  ds.train_count = 1;
  ds.inputs = {0.3, -0.4};
  ds.labels = {0};
  return ds;
}

}  // namespace

TEST_CASE("redistribution with beta = 0 is uniform") {
  const Model model = HandSetModel(3.0, 1.0);
  const RedistributionVector r = ComputeRedistribution(model, TinyDataset(), 0.0);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.5);
}

TEST_CASE("redistribution follows hand-set gradient magnitudes") {
  // |dL/dh1| ratio 3:1 and beta = 1 gives r = (0.75, 0.25).
  const Model model = HandSetModel(3.0, 1.0);
  const RedistributionVector r = ComputeRedistribution(model, TinyDataset(), 1.0);
  CHECK(r[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("constant gradient magnitudes give uniform redistribution") {
  const Model model = HandSetModel(2.0, 2.0);
  const RedistributionVector r = ComputeRedistribution(model, TinyDataset(), 1.7);
  CHECK(r[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("all-zero forward derivatives fall back to uniform") {
  const Model model = HandSetModel(0.0, 0.0);
  const RedistributionVector r = ComputeRedistribution(model, TinyDataset(), 1.0);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 0.5);
}

TEST_CASE("disabled privacy machinery reproduces plain SGD bit for bit") {
  const Dataset data = MakeSynthetic(64, 3, 2, 5);
  TrainConfig config = SmallConfig(data, 7);
  config.grad_noise_scale = 0.0;
  config.clip_norm = 1e9;
  config.gamma_enabled = false;
  config.steps = 8;
  const TrainedModel trained = Train(config, data);

  // Plain SGD replica drawing from the same documented streams.
  Rng root(config.seed);
  Rng init_rng = root.Split(TrainStreams::kInit);
  Rng batch_rng = root.Split(TrainStreams::kBatch);
  Model model = Model::RandomInit(config.arch, init_rng);
  for (int t = 0; t < config.steps; ++t) {
    std::vector<int> indices(config.batch_size);
    for (int& idx : indices) {
      idx = static_cast<int>(batch_rng.NextIndex(data.train_count));
    }
    std::vector<double> sum(model.theta().size(), 0.0);
    for (int idx : indices) {
      const std::vector<double> y = OneHot(data.labels[idx], 2);
      const std::vector<double> g =
          PerExampleGradient(model, data.Input(idx), y);
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += g[j];
    }
    for (std::size_t j = 0; j < sum.size(); ++j) {
      model.theta()[j] -= config.learning_rate * (sum[j] / config.batch_size);
    }
  }
  CHECK(trained.model.theta() == model.theta());
}

TEST_CASE("two-step scripted replay reproduces training bit for bit") {
  // Four-example synthetic set, gamma enabled, everything on.
  Dataset data = MakeSynthetic(5, 3, 2, 13);
  data.train_count = 4;
  TrainConfig config;
  config.arch.dense = {DenseSpec{3, 4}, DenseSpec{4, 2}};
  config.batch_size = 3;
  config.learning_rate = 0.5;
  config.clip_norm = 0.7;
  config.grad_noise_scale = 1.3;
  config.steps = 2;
  config.seed = 99;
  config.pretrain_steps = 12;
  const TrainedModel trained = Train(config, data);

  // Line-by-line replay of the training algorithm.
  Rng root(config.seed);
  const Model pretrained = Pretrain(config, data);
  const RedistributionVector r =
      ComputeRedistribution(pretrained, data, config.inflation_rate);
  const double delta_f =
      FirstLayerSensitivity(pretrained, r, config.sensitivity_norm);
  NoiseSpec spec;
  spec.mechanism = Mechanism::kHeterogeneous;
  spec.sigma = CalibrateSigmaR(config.robustness.epsilon,
                               config.robustness.delta, delta_f, 1.0);
  spec.sensitivity = delta_f;
  spec.r = r;
  spec.k = 4;
  Rng gamma_rng = root.Split(TrainStreams::kGamma);
  const std::vector<double> gamma = SampleNoise(spec, gamma_rng);

  Rng init_rng = root.Split(TrainStreams::kInit);
  Rng batch_rng = root.Split(TrainStreams::kBatch);
  Rng noise_rng = root.Split(TrainStreams::kGradNoise);
  Model model = Model::RandomInit(config.arch, init_rng);
  const double noise_std = config.grad_noise_scale * config.clip_norm;
  for (int t = 0; t < config.steps; ++t) {
    std::vector<int> indices(config.batch_size);
    for (int& idx : indices) {
      idx = static_cast<int>(batch_rng.NextIndex(data.train_count));
    }
    std::vector<double> sum(model.theta().size(), 0.0);
    for (int idx : indices) {
      const std::vector<double> y = OneHot(data.labels[idx], 2);
      std::vector<double> g =
          PerExampleGradient(model, data.Input(idx), y, gamma);
      const double divisor = std::max(1.0, L2Norm(g) / config.clip_norm);
      for (double& v : g) v /= divisor;
      for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += g[j];
    }
    for (std::size_t j = 0; j < sum.size(); ++j) {
      const double noise = noise_std * noise_rng.NextGaussian();
      model.theta()[j] -=
          config.learning_rate * ((sum[j] + noise) / config.batch_size);
    }
  }
  CHECK(trained.model.theta() == model.theta());
  CHECK(trained.gamma_spec.sigma == spec.sigma);
  CHECK(trained.delta_f_calibration == delta_f);
  CHECK(trained.FrozenGamma() == gamma);
}

TEST_CASE("per-example gradients are clipped to C at every step") {
  const Dataset data = MakeSynthetic(80, 3, 2, 17);
  TrainConfig config = SmallConfig(data, 3);
  config.clip_norm = 0.05;
  config.steps = 40;
  TrainRecorder recorder;
  recorder.record_clipped_norms = true;
  Train(config, data, &recorder);
  REQUIRE(recorder.clipped_norms.size() == 40);
  for (const auto& step : recorder.clipped_norms) {
    REQUIRE(step.size() == 4);
    for (double norm : step) CHECK(norm <= config.clip_norm + 1e-12);
  }
}

TEST_CASE("gamma is drawn once and reused at every step") {
  const Dataset data = MakeSynthetic(40, 3, 2, 23);
  TrainConfig config = SmallConfig(data, 29);
  config.steps = 6;
  TrainRecorder recorder;
  recorder.record_gamma = true;
  const TrainedModel trained = Train(config, data, &recorder);
  REQUIRE(recorder.gamma_per_step.size() == 6);
  for (const auto& gamma : recorder.gamma_per_step) {
    CHECK(gamma == recorder.gamma_per_step.front());
  }
  CHECK(trained.FrozenGamma() == recorder.gamma_per_step.front());

  config.gamma_redraw_per_step = true;
  TrainRecorder redraw;
  redraw.record_gamma = true;
  Train(config, data, &redraw);
  CHECK(redraw.gamma_per_step[0] != redraw.gamma_per_step[1]);
}

TEST_CASE("gradient noise variance matches sigma^2 C^2 / m^2") {
  const Dataset data = MakeSynthetic(60, 4, 2, 41);
  TrainConfig config;
  config.arch.dense = {DenseSpec{4, 8}, DenseSpec{8, 2}};
  config.batch_size = 4;
  config.learning_rate = 0.05;
  config.clip_norm = 0.8;
  config.grad_noise_scale = 1.5;
  config.steps = 200;
  config.seed = 53;
  config.pretrain_steps = 10;
  TrainRecorder recorder;
  recorder.record_grad_noise = true;
  Train(config, data, &recorder);

  double sum = 0.0, sq = 0.0;
  std::int64_t count = 0;
  for (const auto& step : recorder.grad_noise) {
    for (double v : step) {
      sum += v;
      sq += v * v;
      ++count;
    }
  }
  REQUIRE(count >= 10000);
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  const double expected = config.grad_noise_scale * config.grad_noise_scale *
                          config.clip_norm * config.clip_norm /
                          (config.batch_size * config.batch_size);
  CHECK(var == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("dpsgd baseline equals train with gamma disabled") {
  const Dataset data = MakeSynthetic(50, 3, 2, 61);
  TrainConfig config = SmallConfig(data, 67);
  const TrainedModel baseline = TrainDpsgdBaseline(config, data);
  TrainConfig no_gamma = config;
  no_gamma.gamma_enabled = false;
  const TrainedModel manual = Train(no_gamma, data);
  CHECK(baseline.model.theta() == manual.model.theta());
  CHECK_FALSE(baseline.gamma_enabled);
  CHECK(baseline.gamma_spec.sigma == 0.0);
}

TEST_CASE("training is deterministic per seed") {
  const Dataset data = MakeSynthetic(50, 3, 2, 71);
  const TrainConfig config = SmallConfig(data, 73);
  const TrainedModel a = Train(config, data);
  const TrainedModel b = Train(config, data);
  CHECK(a.model.theta() == b.model.theta());
  CHECK(a.delta_f == b.delta_f);
  CHECK(a.gamma_spec.sigma == b.gamma_spec.sigma);
}

TEST_CASE("training records the accounting inputs") {
  const Dataset data = MakeSynthetic(50, 3, 2, 81);
  TrainConfig config = SmallConfig(data, 83);
  config.grad_noise_scale = 1.25;
  config.clip_norm = 0.5;
  config.steps = 12;
  const TrainedModel trained = Train(config, data);
  CHECK(trained.accounting.noise_scale == 1.25);
  CHECK(trained.accounting.clip_norm == 0.5);
  CHECK(trained.accounting.sample_rate ==
        doctest::Approx(4.0 / data.train_count));
  CHECK(trained.accounting.steps == 12);
}

TEST_CASE("divergent training aborts with a diagnostic") {
  const Dataset data = MakeSynthetic(30, 3, 2, 91);
  TrainConfig config = SmallConfig(data, 93);
  config.learning_rate = 1e308;
  config.clip_norm = 1e9;
  config.grad_noise_scale = 1.0;
  config.steps = 5;
  CHECK_THROWS_AS(Train(config, data), std::runtime_error);
}

TEST_CASE("batch size beyond the dataset samples with replacement") {
  const Dataset data = MakeSynthetic(6, 3, 2, 95);
  TrainConfig config = SmallConfig(data, 97);
  config.batch_size = 16;  // larger than the 4-row training split
  config.steps = 3;
  const TrainedModel trained = Train(config, data);
  CHECK(trained.model.HasFiniteParams());
}
