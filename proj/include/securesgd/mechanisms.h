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

#ifndef SECURESGD_MECHANISMS_H_
#define SECURESGD_MECHANISMS_H_

#include <string>
#include <vector>

#include "securesgd/rng.h"

namespace securesgd {

// Privacy budget epsilon > 0 and broken probability delta in (0, 1).
// Also used for the robustness budget (eps_r, delta_r).
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-5;
};

enum class Mechanism { kClassic, kExtended, kHeterogeneous, kAnalytic };

std::string MechanismName(Mechanism m);
Mechanism MechanismFromName(const std::string& name);

// Per-component noise weights: r_i in [0, 1], sum_i r_i = 1.  Entries below
// 1e-12 are floored and the vector renormalized, since the heterogeneous
// sensitivity divides by r_i.
class RedistributionVector {
 public:
  explicit RedistributionVector(std::vector<double> weights);
  static RedistributionVector Uniform(int k);

  int size() const { return static_cast<int>(r_.size()); }
  double operator[](int i) const { return r_[i]; }
  const std::vector<double>& values() const { return r_; }
  bool IsUniform(double tol = 1e-12) const;

 private:
  std::vector<double> r_;
};

// Calibrated noise description.  Per-component standard deviation is
// sigma * sqrt(K * r_i) for the heterogeneous mechanism and sigma otherwise.
struct NoiseSpec {
  Mechanism mechanism = Mechanism::kExtended;
  double sigma = 0.0;        // base scale
  double sensitivity = 1.0;  // Delta_A
  RedistributionVector r = RedistributionVector::Uniform(1);
  int k = 1;

  double ComponentStddev(int i) const;
};

// sigma = sqrt(2 ln(1.25/delta)) * sensitivity / epsilon.
// Requires epsilon in (0, 1].
double CalibrateClassic(const PrivacyParams& p, double sensitivity);

// Minimal sigma of the extended mechanism, valid for every epsilon > 0:
//   sigma = sqrt(2)*sensitivity/(2 eps) * (sqrt(s) + sqrt(s + eps)),
//   s = ln(sqrt(2/pi) / delta).
// For delta at or above sqrt(2/pi)*e^(-1/2) this condition no longer implies
// the companion requirement sigma >= (1 + sqrt(1 + 2 eps)) / (2 eps) *
// sensitivity, so the maximum of the two is returned; for delta above
// sqrt(2/pi) (s < 0) only the companion requirement applies.
double CalibrateExtended(const PrivacyParams& p, double sensitivity);

// Heterogeneous calibration: base sigma equals CalibrateExtended, noise on
// component i is scaled by sqrt(K * r_i).  `sensitivity` is the r-weighted
// l2 sensitivity max ||(A(D) - A(D')) / sqrt(K r)||_2.
NoiseSpec CalibrateHgm(const PrivacyParams& p, double sensitivity,
                       const RedistributionVector& r);

// Minimal sigma satisfying the exact Gaussian DP condition
//   Phi(D/(2 sigma) - eps sigma/D) - e^eps Phi(-D/(2 sigma) - eps sigma/D)
//     <= delta,
// found by bisection to 1e-10 relative tolerance.
double CalibrateAnalytic(const PrivacyParams& p, double sensitivity);

// Exact DP delta attained by a Gaussian mechanism with the given scale at
// privacy level epsilon (unit sensitivity: pass sigma/sensitivity).
double AnalyticGaussianDelta(double epsilon, double sigma_over_sensitivity);

// One independent draw per component, component i ~ N(0, ComponentStddev(i)^2).
std::vector<double> SampleNoise(const NoiseSpec& spec, Rng& rng);

}  // namespace securesgd

#endif  // SECURESGD_MECHANISMS_H_
