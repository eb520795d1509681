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

#include "securesgd/mechanisms.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "securesgd/normal.h"

namespace securesgd {
namespace {

constexpr double kMinRedistributionEntry = 1e-12;
constexpr double kSimplexTolerance = 1e-9;
constexpr double kAnalyticRelTolerance = 1e-10;

void CheckDelta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
}

void CheckEpsilonPositive(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::domain_error("epsilon must be finite and positive");
  }
}

void CheckSensitivity(double sensitivity) {
  if (!(sensitivity >= 0.0) || !std::isfinite(sensitivity)) {
    throw std::domain_error("sensitivity must be finite and nonnegative");
  }
}

}  // namespace

std::string MechanismName(Mechanism m) {
  switch (m) {
    case Mechanism::kClassic: return "classic";
    case Mechanism::kExtended: return "extended";
    case Mechanism::kHeterogeneous: return "heterogeneous";
    case Mechanism::kAnalytic: return "analytic";
  }
  throw std::logic_error("unknown mechanism");
}

Mechanism MechanismFromName(const std::string& name) {
  if (name == "classic") return Mechanism::kClassic;
  if (name == "extended") return Mechanism::kExtended;
  if (name == "heterogeneous" || name == "hgm") return Mechanism::kHeterogeneous;
  if (name == "analytic" || name == "agm") return Mechanism::kAnalytic;
  throw std::invalid_argument("unknown mechanism name: " + name);
}

RedistributionVector::RedistributionVector(std::vector<double> weights)
    : r_(std::move(weights)) {
  if (r_.empty()) {
    throw std::invalid_argument("redistribution vector must have K >= 1");
  }
  double sum = 0.0;
  for (double v : r_) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument(
          "redistribution entries must lie in [0, 1]");
    }
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kSimplexTolerance) {
    if (sum <= 0.0) {
      throw std::invalid_argument("redistribution vector must not sum to 0");
    }
  }
  for (double& v : r_) v /= sum;
  // Floor tiny entries: the heterogeneous sensitivity divides by r_i.
  bool floored = false;
  for (double& v : r_) {
    if (v < kMinRedistributionEntry) {
      v = kMinRedistributionEntry;
      floored = true;
    }
  }
  if (floored) {
    double s = std::accumulate(r_.begin(), r_.end(), 0.0);
    for (double& v : r_) v /= s;
  }
}

RedistributionVector RedistributionVector::Uniform(int k) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  return RedistributionVector(std::vector<double>(k, 1.0 / k));
}

bool RedistributionVector::IsUniform(double tol) const {
  const double u = 1.0 / size();
  for (double v : r_) {
    if (std::fabs(v - u) > tol) return false;
  }
  return true;
}

double NoiseSpec::ComponentStddev(int i) const {
  if (i < 0 || i >= k) throw std::out_of_range("component index");
  if (mechanism == Mechanism::kHeterogeneous) {
    return sigma * std::sqrt(k * r[i]);
  }
  return sigma;
}

double CalibrateClassic(const PrivacyParams& p, double sensitivity) {
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
    throw std::domain_error(
        "classic Gaussian mechanism requires epsilon in (0, 1]");
  }
  CheckDelta(p.delta);
  CheckSensitivity(sensitivity);
  const double log_arg = 1.25 / p.delta;
  if (log_arg <= 1.0) {
    throw std::domain_error("classic calibration needs delta < 1.25");
  }
  return sensitivity * (std::sqrt(2.0 * std::log(log_arg)) / p.epsilon);
}

double CalibrateExtended(const PrivacyParams& p, double sensitivity) {
  CheckEpsilonPositive(p.epsilon);
  CheckDelta(p.delta);
  CheckSensitivity(sensitivity);
  const double eps = p.epsilon;
  const double s = std::log(std::sqrt(2.0 / M_PI) / p.delta);
  const double condition1 = (1.0 + std::sqrt(1.0 + 2.0 * eps)) / (2.0 * eps);
  if (s < 0.0) {
    // delta > sqrt(2/pi): the tail requirement is vacuous.
    return sensitivity * condition1;
  }
  const double condition2 =
      std::sqrt(2.0) / (2.0 * eps) * (std::sqrt(s) + std::sqrt(s + eps));
  // Condition 2 implies condition 1 only when s > 1/2, i.e. delta below
  // sqrt(2/pi) e^(-1/2) ~ 0.4839.
  const double scale = s > 0.5 ? condition2 : std::max(condition1, condition2);
  return sensitivity * scale;
}

NoiseSpec CalibrateHgm(const PrivacyParams& p, double sensitivity,
                       const RedistributionVector& r) {
  NoiseSpec spec;
  spec.mechanism = Mechanism::kHeterogeneous;
  spec.sigma = CalibrateExtended(p, sensitivity);
  spec.sensitivity = sensitivity;
  spec.r = r;
  spec.k = r.size();
  return spec;
}

double AnalyticGaussianDelta(double epsilon, double sigma_over_sensitivity) {
  const double sigma = sigma_over_sensitivity;
  const double a = 1.0 / (2.0 * sigma);
  const double b = epsilon * sigma;
  if (std::isnan(b) || std::isinf(sigma)) return 0.0;
  return StandardNormalCdf(a - b) -
         std::exp(epsilon) * StandardNormalCdf(-a - b);
}

double CalibrateAnalytic(const PrivacyParams& p, double sensitivity) {
  CheckEpsilonPositive(p.epsilon);
  CheckDelta(p.delta);
  CheckSensitivity(sensitivity);
  if (sensitivity == 0.0) return 0.0;
  // Solve at unit sensitivity and rescale, keeping exact linearity in the
  // sensitivity.  AnalyticGaussianDelta is strictly decreasing in sigma.
  double lo = 0.0;
  double hi = 1.0;
  while (AnalyticGaussianDelta(p.epsilon, hi) > p.delta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("analytic calibration diverged");
  }
  while (hi - lo > kAnalyticRelTolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (AnalyticGaussianDelta(p.epsilon, mid) > p.delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return sensitivity * hi;
}

std::vector<double> SampleNoise(const NoiseSpec& spec, Rng& rng) {
  if (spec.k != spec.r.size()) {
    throw std::invalid_argument("NoiseSpec K does not match r length");
  }
  std::vector<double> noise(spec.k);
  for (int i = 0; i < spec.k; ++i) {
    noise[i] = spec.ComponentStddev(i) * rng.NextGaussian();
  }
  return noise;
}

}  // namespace securesgd
