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

#include "securesgd/attacks.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "securesgd/rng.h"

namespace securesgd {
namespace {

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void ProjectAndClamp(std::span<const double> x, std::vector<double>& x_adv,
                     double mu_a) {
  for (std::size_t j = 0; j < x_adv.size(); ++j) {
    x_adv[j] = std::clamp(x_adv[j], x[j] - mu_a, x[j] + mu_a);
    x_adv[j] = std::clamp(x_adv[j], -1.0, 1.0);
  }
}

}  // namespace

std::string AttackFamilyName(AttackFamily family) {
  switch (family) {
    case AttackFamily::kFgsm: return "fgsm";
    case AttackFamily::kIfgsm: return "ifgsm";
    case AttackFamily::kMim: return "mim";
    case AttackFamily::kMadry: return "madry";
  }
  throw std::logic_error("unknown attack family");
}

AttackFamily AttackFamilyFromName(const std::string& name) {
  if (name == "fgsm") return AttackFamily::kFgsm;
  if (name == "ifgsm") return AttackFamily::kIfgsm;
  if (name == "mim") return AttackFamily::kMim;
  if (name == "madry") return AttackFamily::kMadry;
  throw std::invalid_argument("unknown attack family: " + name);
}

std::vector<double> Fgsm(const Model& model, std::span<const double> x,
                         int y_true, double mu_a,
                         std::span<const double> h1_noise) {
  const std::vector<double> y = OneHot(y_true, model.arch().NumClasses());
  const std::vector<double> grad = InputGradient(model, x, y, h1_noise);
  std::vector<double> x_adv(x.begin(), x.end());
  for (std::size_t j = 0; j < x_adv.size(); ++j) {
    x_adv[j] += mu_a * Sign(grad[j]);
  }
  ProjectAndClamp(x, x_adv, mu_a);
  return x_adv;
}

std::vector<double> IteratedAttack(const Model& model,
                                   std::span<const double> x, int y_true,
                                   const AttackConfig& config,
                                   std::span<const double> h1_noise) {
  if (config.mu_a < 0.0) throw std::invalid_argument("mu_a must be >= 0");
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (config.family == AttackFamily::kFgsm) {
    return Fgsm(model, x, y_true, config.mu_a, h1_noise);
  }

  const std::vector<double> y = OneHot(y_true, model.arch().NumClasses());
  const double step = config.mu_a / config.steps;
  std::vector<double> x_adv(x.begin(), x.end());

  if (config.family == AttackFamily::kMadry && config.random_start) {
    Rng rng(config.seed);
    for (std::size_t j = 0; j < x_adv.size(); ++j) {
      x_adv[j] += rng.NextUniform(-config.mu_a, config.mu_a);
    }
    ProjectAndClamp(x, x_adv, config.mu_a);
  }

  std::vector<double> momentum(x.size(), 0.0);
  for (int t = 0; t < config.steps; ++t) {
    const std::vector<double> grad = InputGradient(model, x_adv, y, h1_noise);
    std::span<const double> direction = grad;
    if (config.family == AttackFamily::kMim) {
      double l1 = 0.0;
      for (double g : grad) l1 += std::fabs(g);
      if (l1 > 0.0) {
        for (std::size_t j = 0; j < momentum.size(); ++j) {
          momentum[j] = config.momentum_decay * momentum[j] + grad[j] / l1;
        }
      } else {
        for (double& m : momentum) m *= config.momentum_decay;
      }
      direction = momentum;
    }
    for (std::size_t j = 0; j < x_adv.size(); ++j) {
      x_adv[j] += step * Sign(direction[j]);
    }
    ProjectAndClamp(x, x_adv, config.mu_a);
  }
  return x_adv;
}

std::vector<double> RunAttack(const TrainedModel& model,
                              std::span<const double> x, int y_true,
                              const AttackConfig& config) {
  const std::vector<double> gamma = model.FrozenGamma();
  return IteratedAttack(model.model, x, y_true, config, gamma);
}

double LinfDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::fabs(a[i] - b[i]));
  }
  return d;
}

}  // namespace securesgd
