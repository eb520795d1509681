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

#include "securesgd/robustness.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "securesgd/secure_sgd.h"

namespace securesgd {
namespace {

constexpr double kEpsCap = 100.0;
constexpr double kEpsTolerance = 1e-9;
constexpr double kMuHi = 10.0;
constexpr int kMuIterations = 40;

void CheckFirstLayerShape(std::span<const double> w1, int d, int k,
                          const RedistributionVector& r) {
  if (d < 1 || k < 1 ||
      static_cast<std::size_t>(d) * k != w1.size()) {
    throw std::invalid_argument("W1 shape mismatch");
  }
  if (r.size() != k) {
    throw std::invalid_argument("redistribution length must equal K");
  }
}

// Sensitivity bounds restricted to a subset of hidden units (used for the
// per-feature-map conv bound); `use_column` marks the active units.
double SensitivityL2Masked(std::span<const double> w1, int d, int k,
                           const RedistributionVector& r,
                           const std::vector<char>& use_column) {
  double best = 0.0;
  for (int j = 0; j < d; ++j) {
    double sq = 0.0;
    for (int c = 0; c < k; ++c) {
      if (!use_column[c]) continue;
      const double v = w1[static_cast<std::size_t>(j) * k + c];
      sq += v * v / (k * r[c]);
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

double SensitivityLinfMasked(std::span<const double> w1, int d, int k,
                             const RedistributionVector& r,
                             const std::vector<char>& use_column) {
  double best = 0.0;
  for (int c = 0; c < k; ++c) {
    if (!use_column[c]) continue;
    double fan_in = 0.0;
    for (int j = 0; j < d; ++j) {
      fan_in += std::fabs(w1[static_cast<std::size_t>(j) * k + c]);
    }
    best = std::max(best, fan_in / (k * r[c]));
  }
  return std::sqrt(static_cast<double>(k)) * best;
}

}  // namespace

std::string NormKindName(NormKind kind) {
  switch (kind) {
    case NormKind::kL1: return "l1";
    case NormKind::kL2: return "l2";
    case NormKind::kLinf: return "linf";
  }
  throw std::logic_error("unknown norm kind");
}

NormKind NormKindFromName(const std::string& name) {
  if (name == "l1") return NormKind::kL1;
  if (name == "l2") return NormKind::kL2;
  if (name == "linf") return NormKind::kLinf;
  throw std::invalid_argument("unknown norm kind: " + name);
}

double SensitivityL2(std::span<const double> w1, int d, int k,
                     const RedistributionVector& r) {
  CheckFirstLayerShape(w1, d, k, r);
  return SensitivityL2Masked(w1, d, k, r, std::vector<char>(k, 1));
}

double SensitivityLinf(std::span<const double> w1, int d, int k,
                       const RedistributionVector& r) {
  CheckFirstLayerShape(w1, d, k, r);
  return SensitivityLinfMasked(w1, d, k, r, std::vector<char>(k, 1));
}

double FirstLayerSensitivity(const Model& model, const RedistributionVector& r,
                             NormKind kind) {
  const Model::FirstLayerMatrix m = model.UnrolledFirstLayer();
  if (r.size() != m.k) {
    throw std::invalid_argument("redistribution length must equal |h1|");
  }
  double best = 0.0;
  for (int channel = 0; channel < m.num_channels; ++channel) {
    std::vector<char> mask(m.k, 0);
    for (int c = 0; c < m.k; ++c) {
      mask[c] = m.column_channel[c] == channel ? 1 : 0;
    }
    double value = 0.0;
    switch (kind) {
      case NormKind::kL1:
      case NormKind::kL2:
        value = SensitivityL2Masked(m.w, m.d, m.k, r, mask);
        break;
      case NormKind::kLinf:
        value = SensitivityLinfMasked(m.w, m.d, m.k, r, mask);
        break;
    }
    best = std::max(best, value);
  }
  return best;
}

double CalibrateSigmaR(double eps_r, double delta_r, double delta_f,
                       double mu) {
  if (!(eps_r > 0.0) || !(delta_f > 0.0) || !(mu > 0.0)) {
    throw std::domain_error("CalibrateSigmaR: inputs must be positive");
  }
  if (!(delta_r > 0.0 && delta_r < 1.0)) {
    throw std::domain_error("delta_r must lie in (0, 1)");
  }
  const double s = std::log(std::sqrt(2.0 / M_PI) / delta_r);
  if (s < 0.0) {
    throw std::domain_error("delta_r too large for the robustness bound");
  }
  return std::sqrt(2.0) / (2.0 * eps_r) *
         (std::sqrt(s) + std::sqrt(s + eps_r)) * delta_f * mu / eps_r;
}

std::optional<double> SolveEpsR(double sigma_r, double delta_r, double delta_f,
                                double mu) {
  if (!(sigma_r > 0.0) || !(delta_f > 0.0) || !(mu > 0.0)) {
    throw std::domain_error("SolveEpsR: inputs must be positive");
  }
  // CalibrateSigmaR is strictly decreasing in eps_r; no root below the cap
  // means the trained sigma_r cannot support a perturbation of size mu.
  if (CalibrateSigmaR(kEpsCap, delta_r, delta_f, mu) > sigma_r) {
    return std::nullopt;
  }
  double hi = kEpsCap;
  while (CalibrateSigmaR(hi / 2.0, delta_r, delta_f, mu) <= sigma_r) {
    hi /= 2.0;
    if (hi < 1e-12) break;
  }
  double lo = hi / 2.0;
  // Invariant: sigma(lo) > sigma_r >= sigma(hi).
  while (hi - lo > kEpsTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (CalibrateSigmaR(mid, delta_r, delta_f, mu) <= sigma_r) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ScoreBounds MonteCarloScores(const TrainedModel& model,
                             std::span<const double> x, int n_draws,
                             double eta, const Rng& rng, bool parallel) {
  if (!model.gamma_enabled || model.gamma_spec.sigma <= 0.0) {
    throw std::invalid_argument(
        "certification requires a model trained with robustness noise");
  }
  if (n_draws < 30) throw std::invalid_argument("need at least 30 draws");
  if (!(eta > 0.5 && eta < 1.0)) {
    throw std::invalid_argument("eta must lie in (0.5, 1)");
  }
  const int num_classes = model.model.arch().NumClasses();

  // Fresh noise per draw, one split stream per draw; per-draw scores are
  // summed in draw order after the parallel region.
  std::vector<double> per_draw(static_cast<std::size_t>(n_draws) * num_classes);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n_draws; ++i) {
    Rng stream = rng.Split(static_cast<std::uint64_t>(i));
    const std::vector<double> gamma = SampleNoise(model.gamma_spec, stream);
    const ForwardResult fwd = Forward(model.model, x, gamma);
    std::copy(fwd.scores.begin(), fwd.scores.end(),
              per_draw.begin() + static_cast<std::size_t>(i) * num_classes);
  }

  ScoreBounds bounds;
  bounds.n_draws = n_draws;
  bounds.eta = eta;
  bounds.e_hat.assign(num_classes, 0.0);
  for (int i = 0; i < n_draws; ++i) {
    for (int c = 0; c < num_classes; ++c) {
      bounds.e_hat[c] += per_draw[static_cast<std::size_t>(i) * num_classes + c];
    }
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

CertificationResult CertifyFromBounds(const ScoreBounds& bounds,
                                      double sigma_r, double delta_r,
                                      double delta_f, double mu_a) {
  const int num_classes = static_cast<int>(bounds.e_hat.size());
  CertificationResult result;
  result.label = ArgMax(bounds.e_hat);
  result.e_lb = bounds.e_lb;
  result.e_ub = bounds.e_ub;
  result.n_draws = bounds.n_draws;
  result.eta = bounds.eta;

  double rival_ub = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    if (c != result.label) rival_ub = std::max(rival_ub, bounds.e_ub[c]);
  }
  const double lb = bounds.e_lb[result.label];

  const auto check = [&](double mu) {
    const std::optional<double> eps_r = SolveEpsR(sigma_r, delta_r, delta_f, mu);
    if (!eps_r) return false;
    return lb > std::exp(2.0 * *eps_r) * rival_ub +
                    (1.0 + std::exp(*eps_r)) * delta_r;
  };

  double lo = 0.0, hi = kMuHi;
  if (check(hi)) {
    result.mu_max = hi;
  } else {
    for (int i = 0; i < kMuIterations; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (check(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    result.mu_max = lo;
  }
  result.is_robust = result.mu_max >= mu_a;
  return result;
}

CertificationResult Certify(const TrainedModel& model,
                            std::span<const double> x, double mu_a,
                            int n_draws, double eta, const Rng& rng,
                            bool parallel) {
  const ScoreBounds bounds = MonteCarloScores(model, x, n_draws, eta, rng, parallel);
  return CertifyFromBounds(bounds, model.gamma_spec.sigma,
                           model.robustness_budget.delta, model.delta_f, mu_a);
}

int MonteCarloPrediction(const TrainedModel& model, std::span<const double> x,
                         int n_draws, const Rng& rng, bool parallel) {
  if (!model.gamma_enabled) {
    return ArgMax(Forward(model.model, x).scores);
  }
  const int num_classes = model.model.arch().NumClasses();
  std::vector<double> per_draw(static_cast<std::size_t>(n_draws) * num_classes);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n_draws; ++i) {
    Rng stream = rng.Split(static_cast<std::uint64_t>(i));
    const std::vector<double> gamma = SampleNoise(model.gamma_spec, stream);
    const ForwardResult fwd = Forward(model.model, x, gamma);
    std::copy(fwd.scores.begin(), fwd.scores.end(),
              per_draw.begin() + static_cast<std::size_t>(i) * num_classes);
  }
  std::vector<double> mean(num_classes, 0.0);
  for (int i = 0; i < n_draws; ++i) {
    for (int c = 0; c < num_classes; ++c) {
      mean[c] += per_draw[static_cast<std::size_t>(i) * num_classes + c];
    }
  }
  return ArgMax(mean);
}

}  // namespace securesgd
