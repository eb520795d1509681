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

#ifndef SECURESGD_ROBUSTNESS_H_
#define SECURESGD_ROBUSTNESS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "securesgd/mechanisms.h"
#include "securesgd/network.h"
#include "securesgd/rng.h"

namespace securesgd {

struct TrainedModel;

// Attack norm the sensitivity bound pairs with.
enum class NormKind { kL1, kL2, kLinf };
std::string NormKindName(NormKind kind);
NormKind NormKindFromName(const std::string& name);

// First-layer sensitivity bound with per-output weighting 1 / sqrt(K r_k).
// W1 is d x K row-major, rows indexed by input coordinates (the layer
// computes h1 = W1^T x).  This is the exact Lipschitz constant from
// single-coordinate (l1-ball) input changes to the weighted h1:
//   max_j || W1[j, :] / sqrt(K r) ||_2.
double SensitivityL2(std::span<const double> w1, int d, int k,
                     const RedistributionVector& r);

// Bound for l-infinity input perturbations:
//   sqrt(K) * max_k  sum_j |W1[j, k]| / (K r_k),
// the maximum over hidden units of the 1-norm of the unit's fan-in weights
// scaled by K r_k.  Any ||x - x'||_inf <= 1 moves the weighted h1 by at most
// this amount.
double SensitivityLinf(std::span<const double> w1, int d, int k,
                       const RedistributionVector& r);

// Sensitivity of a model's first layer.  Dense layers use the bounds above
// directly; a conv first layer is unrolled and the bound is computed per
// feature map (restricting the hidden units to one output channel) with the
// maximum over channels taken.
double FirstLayerSensitivity(const Model& model, const RedistributionVector& r,
                             NormKind kind);

// sigma_r = sqrt(2)/(2 eps_r) * (sqrt(s) + sqrt(s + eps_r)) * delta_f * mu
//           / eps_r,   s = ln(sqrt(2/pi) / delta_r).
double CalibrateSigmaR(double eps_r, double delta_r, double delta_f,
                       double mu);

// Inverse of CalibrateSigmaR in eps_r (the expression is strictly
// decreasing): the eps_r in (0, 100] with CalibrateSigmaR(eps_r, ...) ==
// sigma_r, to 1e-9 absolute.  nullopt when no root exists below the cap,
// i.e. the trained sigma_r cannot support this mu.
std::optional<double> SolveEpsR(double sigma_r, double delta_r, double delta_f,
                                double mu);

// Monte-Carlo score estimate under fresh first-layer noise draws, with
// simultaneous Hoeffding bounds: each class bound holds at confidence eta
// jointly (union bound), half-width sqrt(ln(2K/(1-eta)) / (2N)), clamped to
// [0, 1].
struct ScoreBounds {
  std::vector<double> e_hat;
  std::vector<double> e_lb;
  std::vector<double> e_ub;
  int n_draws = 0;
  double eta = 0.0;
};

ScoreBounds MonteCarloScores(const TrainedModel& model,
                             std::span<const double> x, int n_draws,
                             double eta, const Rng& rng, bool parallel = true);

struct CertificationResult {
  int label = -1;
  double mu_max = 0.0;
  bool is_robust = false;
  std::vector<double> e_lb;
  std::vector<double> e_ub;
  int n_draws = 0;
  double eta = 0.0;
};

// Robustness check and mu_max search on precomputed expectation bounds:
// the largest mu (binary search on [0, 10], 40 iterations) such that with
// eps_r = SolveEpsR(sigma_r, delta_r, delta_f, mu),
//   e_lb[k] > e^(2 eps_r) * max_{i != k} e_ub[i] + (1 + e^(eps_r)) delta_r.
CertificationResult CertifyFromBounds(const ScoreBounds& bounds,
                                      double sigma_r, double delta_r,
                                      double delta_f, double mu_a);

// Full certification: Monte-Carlo scores (fresh noise per draw, shared
// across the whole mu search) followed by CertifyFromBounds.
CertificationResult Certify(const TrainedModel& model,
                            std::span<const double> x, double mu_a,
                            int n_draws, double eta, const Rng& rng,
                            bool parallel = true);

// Prediction by the argmax of the Monte-Carlo mean score.
int MonteCarloPrediction(const TrainedModel& model, std::span<const double> x,
                         int n_draws, const Rng& rng, bool parallel = true);

}  // namespace securesgd

#endif  // SECURESGD_ROBUSTNESS_H_
