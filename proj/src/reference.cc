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

#include "securesgd/reference.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "securesgd/normal.h"

namespace securesgd::reference {

AuditReport MonteCarloAudit(const NoiseSpec& spec, const PrivacyParams& p,
                            std::span<const double> shift,
                            std::int64_t samples, const Rng& rng) {
  if (static_cast<int>(shift.size()) != spec.k) {
    throw std::invalid_argument("shift length must equal spec K");
  }
  double weighted_sq = 0.0;
  for (int k = 0; k < spec.k; ++k) {
    weighted_sq += shift[k] * shift[k] / (spec.k * spec.r[k]);
  }
  const double weighted_norm = std::sqrt(weighted_sq);

  AuditReport report;
  report.mechanism = spec.mechanism;
  report.epsilon = p.epsilon;
  report.delta = p.delta;
  report.samples = samples;
  if (weighted_norm == 0.0) {
    report.analytic_exceedance = 0.0;
  } else if (spec.mechanism == Mechanism::kAnalytic) {
    report.analytic_exceedance =
        AnalyticGaussianDelta(p.epsilon, spec.sigma / weighted_norm);
  } else {
    report.analytic_exceedance =
        PrivacyLossExceedance(spec.sigma, weighted_norm, p.epsilon);
  }

  double stat = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    Rng stream = rng.Split(static_cast<std::uint64_t>(i));
    const std::vector<double> noise = SampleNoise(spec, stream);
    double loss = 0.0;
    for (int k = 0; k < spec.k; ++k) {
      if (shift[k] == 0.0) continue;
      const double sd = spec.ComponentStddev(k);
      loss +=
          (2.0 * noise[k] * shift[k] + shift[k] * shift[k]) / (2.0 * sd * sd);
    }
    if (spec.mechanism == Mechanism::kAnalytic) {
      stat += std::max(0.0, 1.0 - std::exp(p.epsilon - loss));
    } else if (std::fabs(loss) > p.epsilon) {
      stat += 1.0;
    }
  }
  report.empirical_exceedance = stat / static_cast<double>(samples);
  report.passed =
      report.analytic_exceedance <= p.delta &&
      report.empirical_exceedance <= p.delta + report.EmpiricalMargin();
  return report;
}

ScoreBounds MonteCarloScores(const TrainedModel& model,
                             std::span<const double> x, int n_draws,
                             double eta, const Rng& rng) {
  const int num_classes = model.model.arch().NumClasses();
  ScoreBounds bounds;
  bounds.n_draws = n_draws;
  bounds.eta = eta;
  bounds.e_hat.assign(num_classes, 0.0);
  for (int i = 0; i < n_draws; ++i) {
    Rng stream = rng.Split(static_cast<std::uint64_t>(i));
    const std::vector<double> gamma = SampleNoise(model.gamma_spec, stream);
    const ForwardResult fwd = Forward(model.model, x, gamma);
    for (int c = 0; c < num_classes; ++c) bounds.e_hat[c] += fwd.scores[c];
  }
  for (double& v : bounds.e_hat) v /= n_draws;
  const double half_width =
      std::sqrt(std::log(2.0 * num_classes / (1.0 - eta)) / (2.0 * n_draws));
  bounds.e_lb.resize(num_classes);
  bounds.e_ub.resize(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    bounds.e_lb[c] = std::max(0.0, bounds.e_hat[c] - half_width);
    bounds.e_ub[c] = std::min(1.0, bounds.e_hat[c] + half_width);
  }
  return bounds;
}

std::vector<std::vector<double>> BatchGradients(
    const Model& model, const Batch& batch,
    std::span<const double> h1_noise) {
  std::vector<std::vector<double>> grads(batch.m);
  for (int i = 0; i < batch.m; ++i) {
    grads[i] =
        Backprop(model, batch.Input(i), batch.Label(i), h1_noise).param_grad;
  }
  return grads;
}

}  // namespace securesgd::reference
