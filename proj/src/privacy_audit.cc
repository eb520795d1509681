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

#include "securesgd/privacy_audit.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "securesgd/normal.h"

namespace securesgd {
namespace {

constexpr std::int64_t kChunk = 4096;

// Log density ratio ln p_D(o) / p_D'(o) for o = A(D) + noise, as a function
// of the noise vector:  sum_k (2 n_k v_k + v_k^2) / (2 std_k^2).
double LogDensityRatio(const NoiseSpec& spec, std::span<const double> noise,
                       std::span<const double> shift) {
  double loss = 0.0;
  for (int k = 0; k < spec.k; ++k) {
    if (shift[k] == 0.0) continue;
    const double sd = spec.ComponentStddev(k);
    loss += (2.0 * noise[k] * shift[k] + shift[k] * shift[k]) / (2.0 * sd * sd);
  }
  return loss;
}

double WeightedShiftNorm(const NoiseSpec& spec, std::span<const double> shift) {
  double sq = 0.0;
  for (int k = 0; k < spec.k; ++k) {
    sq += shift[k] * shift[k] / (spec.k * spec.r[k]);
  }
  return std::sqrt(sq);
}

}  // namespace

double AuditReport::EmpiricalMargin() const {
  return 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(samples));
}

double PrivacyLossExceedance(double sigma, double sensitivity,
                             double epsilon) {
  if (!(sigma > 0.0) || !(sensitivity > 0.0) || !(epsilon > 0.0)) {
    throw std::domain_error("PrivacyLossExceedance: inputs must be positive");
  }
  const double mean = sensitivity * sensitivity / (2.0 * sigma * sigma);
  const double sd = sensitivity / sigma;
  return (1.0 - StandardNormalCdf((epsilon - mean) / sd)) +
         StandardNormalCdf((-epsilon - mean) / sd);
}

std::vector<double> AxisAlignedWorstCaseShift(const NoiseSpec& spec,
                                              int axis) {
  if (axis < 0 || axis >= spec.k) throw std::out_of_range("shift axis");
  std::vector<double> shift(spec.k, 0.0);
  shift[axis] = spec.sensitivity * std::sqrt(spec.k * spec.r[axis]);
  return shift;
}

AuditReport MonteCarloAudit(const NoiseSpec& spec, const PrivacyParams& p,
                            std::span<const double> shift,
                            std::int64_t samples, const Rng& rng,
                            bool parallel) {
  if (static_cast<int>(shift.size()) != spec.k) {
    throw std::invalid_argument("shift length must equal spec K");
  }
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const double shifted_norm = WeightedShiftNorm(spec, shift);
  if (shifted_norm > spec.sensitivity * (1.0 + 1e-9)) {
    throw std::invalid_argument(
        "shift violates the r-weighted sensitivity bound");
  }

  AuditReport report;
  report.mechanism = spec.mechanism;
  report.epsilon = p.epsilon;
  report.delta = p.delta;
  report.samples = samples;

  const bool hockey_stick = spec.mechanism == Mechanism::kAnalytic;
  if (shifted_norm == 0.0) {
    report.analytic_exceedance = 0.0;
  } else if (hockey_stick) {
    report.analytic_exceedance =
        AnalyticGaussianDelta(p.epsilon, spec.sigma / shifted_norm);
  } else {
    report.analytic_exceedance =
        PrivacyLossExceedance(spec.sigma, shifted_norm, p.epsilon);
  }

  // Chunked accumulation: per-sample split streams and an ordered merge make
  // the result identical for serial and parallel execution.
  const std::int64_t n_chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> chunk_stat(n_chunks, 0.0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    const std::int64_t begin = c * kChunk;
    const std::int64_t end = std::min(begin + kChunk, samples);
    double acc = 0.0;
    for (std::int64_t i = begin; i < end; ++i) {
      Rng stream = rng.Split(static_cast<std::uint64_t>(i));
      const std::vector<double> noise = SampleNoise(spec, stream);
      const double loss = LogDensityRatio(spec, noise, shift);
      if (hockey_stick) {
        acc += std::max(0.0, 1.0 - std::exp(p.epsilon - loss));
      } else if (std::fabs(loss) > p.epsilon) {
        acc += 1.0;
      }
    }
    chunk_stat[c] = acc;
  }

  double total = 0.0;
  for (double v : chunk_stat) total += v;
  report.empirical_exceedance = total / static_cast<double>(samples);
  report.passed =
      report.analytic_exceedance <= p.delta &&
      report.empirical_exceedance <= p.delta + report.EmpiricalMargin();
  return report;
}

double ConditionCrossoverThreshold() {
  return std::sqrt(2.0 / M_PI) * std::exp(-0.5);
}

bool ConditionCrossover(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  return delta < ConditionCrossoverThreshold();
}

}  // namespace securesgd
