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

#ifndef SECURESGD_REFERENCE_H_
#define SECURESGD_REFERENCE_H_

#include "securesgd/network.h"
#include "securesgd/privacy_audit.h"
#include "securesgd/robustness.h"
#include "securesgd/secure_sgd.h"

// Plain serial implementations of the parallel kernels, written as straight
// loops.  Tests pin the OpenMP kernels against these; the benchmark target
// compares their runtimes.  The per-sample stream derivation matches the
// kernels, so audit counts agree exactly and score sums agree to roundoff.
namespace securesgd::reference {

AuditReport MonteCarloAudit(const NoiseSpec& spec, const PrivacyParams& p,
                            std::span<const double> shift,
                            std::int64_t samples, const Rng& rng);

ScoreBounds MonteCarloScores(const TrainedModel& model,
                             std::span<const double> x, int n_draws,
                             double eta, const Rng& rng);

std::vector<std::vector<double>> BatchGradients(
    const Model& model, const Batch& batch,
    std::span<const double> h1_noise = {});

}  // namespace securesgd::reference

#endif  // SECURESGD_REFERENCE_H_
