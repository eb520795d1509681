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

#ifndef SECURESGD_PRIVACY_AUDIT_H_
#define SECURESGD_PRIVACY_AUDIT_H_

#include <cstdint>
#include <span>

#include "securesgd/mechanisms.h"
#include "securesgd/rng.h"

namespace securesgd {

// Numerical check that a calibrated mechanism meets its (epsilon, delta)
// guarantee.  For the classic/extended/heterogeneous mechanisms the audited
// quantity is the exact probability that the absolute privacy loss exceeds
// epsilon (the guarantee their proofs establish).  The analytic mechanism is
// calibrated against the exact Gaussian DP condition, which the loss
// exceedance strictly overshoots, so its audited quantity is the exact DP
// delta attained at epsilon.
struct AuditReport {
  Mechanism mechanism = Mechanism::kExtended;
  double epsilon = 0.0;
  double delta = 0.0;
  double analytic_exceedance = 0.0;
  double empirical_exceedance = 0.0;
  std::int64_t samples = 0;
  bool passed = false;

  // 3 binomial standard deviations; the empirical pass margin.
  double EmpiricalMargin() const;
};

// Exact Pr(|L| > epsilon) for a Gaussian mechanism with scale sigma and a
// worst-case shift of norm `sensitivity`.  The loss is Gaussian with mean
// sensitivity^2 / (2 sigma^2) and variance sensitivity^2 / sigma^2.
double PrivacyLossExceedance(double sigma, double sensitivity, double epsilon);

// Shift vector that saturates the heterogeneous sensitivity bound along one
// output component: sensitivity * sqrt(K r_axis) * e_axis.
std::vector<double> AxisAlignedWorstCaseShift(const NoiseSpec& spec, int axis);

// Draws `samples` outputs under D, evaluates the log density ratio against
// D' = D + shift and reports the exceedance frequency.  `shift` is the
// output-space difference A(D) - A(D'); it must satisfy
// || shift / sqrt(K r) ||_2 <= spec.sensitivity.  Parallel and serial
// execution produce identical reports (per-sample split streams, ordered
// chunk merge).
AuditReport MonteCarloAudit(const NoiseSpec& spec, const PrivacyParams& p,
                            std::span<const double> shift,
                            std::int64_t samples, const Rng& rng,
                            bool parallel = true);

// True iff Condition 2 alone suffices for the extended mechanism, i.e.
// delta < sqrt(2/pi) * e^(-1/2).
bool ConditionCrossover(double delta);

// The crossover threshold itself.
double ConditionCrossoverThreshold();

}  // namespace securesgd

#endif  // SECURESGD_PRIVACY_AUDIT_H_
