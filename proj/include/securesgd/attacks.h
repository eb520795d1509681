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

#ifndef SECURESGD_ATTACKS_H_
#define SECURESGD_ATTACKS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "securesgd/network.h"
#include "securesgd/secure_sgd.h"

namespace securesgd {

enum class AttackFamily { kFgsm, kIfgsm, kMim, kMadry };
std::string AttackFamilyName(AttackFamily family);
AttackFamily AttackFamilyFromName(const std::string& name);

struct AttackConfig {
  AttackFamily family = AttackFamily::kFgsm;
  double mu_a = 0.1;          // l-infinity radius
  int steps = 10;             // T_mu (iterative families)
  double momentum_decay = 1.0;  // MIM only
  bool random_start = true;   // Madry only
  std::uint64_t seed = 0;
};

// x_adv = clamp(x + mu_a * sign(dL/dx), -1, 1).  The attacked scoring
// function is the deterministic model with the given h1 noise held fixed.
std::vector<double> Fgsm(const Model& model, std::span<const double> x,
                         int y_true, double mu_a,
                         std::span<const double> h1_noise = {});

// Iterative families: `steps` moves of size mu_a / steps, each followed by
// projection onto the l-infinity ball of radius mu_a around x and clamping
// to [-1, 1].  MIM accumulates g <- decay * g + grad / ||grad||_1 and steps
// along sign(g); Madry starts from a uniform point in the ball when
// random_start is set.  A zero gradient leaves the iterate unchanged.
std::vector<double> IteratedAttack(const Model& model,
                                   std::span<const double> x, int y_true,
                                   const AttackConfig& config,
                                   std::span<const double> h1_noise = {});

// Dispatch on family; attacks the deployed model with its frozen gamma.
std::vector<double> RunAttack(const TrainedModel& model,
                              std::span<const double> x, int y_true,
                              const AttackConfig& config);

double LinfDistance(std::span<const double> a, std::span<const double> b);

}  // namespace securesgd

#endif  // SECURESGD_ATTACKS_H_
