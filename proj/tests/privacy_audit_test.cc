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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "securesgd/mechanisms.h"
#include "securesgd/privacy_audit.h"
#include "securesgd/reference.h"
#include "securesgd/rng.h"

using namespace securesgd;

namespace {

NoiseSpec ExtendedSpec(double eps, double delta, double sensitivity, int k) {
  NoiseSpec spec;
  spec.mechanism = Mechanism::kExtended;
  spec.sigma = CalibrateExtended({eps, delta}, sensitivity);
  spec.sensitivity = sensitivity;
  spec.k = k;
  spec.r = RedistributionVector::Uniform(k);
  return spec;
}

}  // namespace

TEST_CASE("loss exceedance vanishes for huge noise") {
  CHECK(PrivacyLossExceedance(1e6, 1.0, 1.0) < 1e-12);
}

TEST_CASE("loss exceedance at the extended calibration meets delta") {
  const double sigma = CalibrateExtended({1.0, 1e-5}, 1.0);
  CHECK(PrivacyLossExceedance(sigma, 1.0, 1.0) <= 1e-5);
}

TEST_CASE("loss exceedance closed form vs Monte-Carlo oracle") {
  // L = (Delta^2 + 2 lambda Delta) / (2 sigma^2), lambda ~ N(0, sigma^2).
  // At sigma = Delta = 1, eps = 0.5 the exact value is 0.5 + Phi(-1).
  const double exact = PrivacyLossExceedance(1.0, 1.0, 0.5);
  CHECK(exact == doctest::Approx(0.65865525393145707).epsilon(1e-12));

  Rng rng(2024);
  const int n = 10000000;
  std::int64_t count = 0;
  for (int i = 0; i < n; ++i) {
    const double lambda = rng.NextGaussian();
    if (std::fabs(1.0 + 2.0 * lambda) / 2.0 > 0.5) ++count;
  }
  const double mc = static_cast<double>(count) / n;
  const double band = 4.0 * std::sqrt(exact * (1.0 - exact) / n);
  CHECK(std::fabs(mc - exact) < band);
}

TEST_CASE("loss exceedance rejects nonpositive inputs") {
  CHECK_THROWS_AS(PrivacyLossExceedance(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(PrivacyLossExceedance(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(PrivacyLossExceedance(1.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("condition crossover threshold, both sides") {
  // sqrt(2/pi) e^(-1/2) = 0.48394144903828673...
  CHECK(ConditionCrossoverThreshold() ==
        doctest::Approx(0.48394144903828673).epsilon(1e-14));
  CHECK(ConditionCrossover(1e-5));
  CHECK(ConditionCrossover(0.48));          // just below the threshold
  CHECK(ConditionCrossover(0.4839));
  CHECK_FALSE(ConditionCrossover(0.4840));  // just above
  CHECK_FALSE(ConditionCrossover(0.9));
  CHECK_THROWS_AS(ConditionCrossover(0.0), std::domain_error);
}

TEST_CASE("audit with worst-case axis shift passes at the calibration") {
  const PrivacyParams p{1.0, 1e-2};
  const NoiseSpec spec = ExtendedSpec(p.epsilon, p.delta, 1.0, 4);
  const std::vector<double> shift = AxisAlignedWorstCaseShift(spec, 0);
  const AuditReport report =
      MonteCarloAudit(spec, p, shift, 1000000, Rng(31));
  CHECK(report.passed);
  CHECK(report.analytic_exceedance <= p.delta);
  CHECK(report.empirical_exceedance <= p.delta + report.EmpiricalMargin());
  // The empirical frequency agrees with the exact exceedance two-sided.
  const double band = 4.0 * std::sqrt(report.analytic_exceedance /
                                      static_cast<double>(report.samples));
  CHECK(std::fabs(report.empirical_exceedance - report.analytic_exceedance) <
        band + 1e-6);
}

TEST_CASE("zero shift means zero loss") {
  const PrivacyParams p{1.0, 1e-2};
  const NoiseSpec spec = ExtendedSpec(p.epsilon, p.delta, 1.0, 3);
  const std::vector<double> shift(3, 0.0);
  const AuditReport report = MonteCarloAudit(spec, p, shift, 20000, Rng(5));
  CHECK(report.analytic_exceedance == 0.0);
  CHECK(report.empirical_exceedance == 0.0);
  CHECK(report.passed);
}

TEST_CASE("heterogeneous audit reduces to the uniform one-dimensional case") {
  const PrivacyParams p{1.0, 1e-2};
  const RedistributionVector r({0.9, 0.1});
  const NoiseSpec spec = CalibrateHgm(p, 1.0, r);
  // Concentrate the shift on the low-noise component, scaled so the
  // r-weighted norm saturates the sensitivity.
  const std::vector<double> shift = AxisAlignedWorstCaseShift(spec, 1);
  CHECK(shift[1] == doctest::Approx(std::sqrt(2.0 * 0.1)));
  const AuditReport het = MonteCarloAudit(spec, p, shift, 500000, Rng(8));
  CHECK(het.passed);

  const NoiseSpec uniform = ExtendedSpec(p.epsilon, p.delta, 1.0, 2);
  const AuditReport uni = MonteCarloAudit(
      uniform, p, AxisAlignedWorstCaseShift(uniform, 0), 500000, Rng(8));
  // Same base sigma and saturated shift: identical analytic exceedance.
  CHECK(het.analytic_exceedance ==
        doctest::Approx(uni.analytic_exceedance).epsilon(1e-12));
}

TEST_CASE("audit exceedance is monotone decreasing in sigma") {
  const PrivacyParams p{1.0, 1e-2};
  NoiseSpec spec = ExtendedSpec(p.epsilon, p.delta, 1.0, 2);
  const std::vector<double> shift = AxisAlignedWorstCaseShift(spec, 0);
  double prev_analytic = 1.0;
  double prev_empirical = 1.0;
  for (double scale : {0.8, 1.0, 1.3, 1.8}) {
    NoiseSpec scaled = spec;
    scaled.sigma = spec.sigma * scale;
    const AuditReport report =
        MonteCarloAudit(scaled, p, shift, 400000, Rng(12));
    CHECK(report.analytic_exceedance < prev_analytic);
    CHECK(report.empirical_exceedance <= prev_empirical);
    prev_analytic = report.analytic_exceedance;
    prev_empirical = report.empirical_exceedance;
  }
}

TEST_CASE("shift outside the sensitivity bound is rejected") {
  const PrivacyParams p{1.0, 1e-2};
  const NoiseSpec spec = ExtendedSpec(p.epsilon, p.delta, 1.0, 2);
  const std::vector<double> shift{1.5, 0.0};
  CHECK_THROWS_AS(MonteCarloAudit(spec, p, shift, 10000, Rng(1)),
                  std::invalid_argument);
}

TEST_CASE("analytic mechanism is audited against its exact guarantee") {
  const PrivacyParams p{1.0, 1e-2};
  NoiseSpec spec;
  spec.mechanism = Mechanism::kAnalytic;
  spec.sigma = CalibrateAnalytic(p, 1.0);
  spec.sensitivity = 1.0;
  spec.k = 2;
  spec.r = RedistributionVector::Uniform(2);
  const AuditReport report = MonteCarloAudit(
      spec, p, AxisAlignedWorstCaseShift(spec, 0), 1000000, Rng(77));
  CHECK(report.analytic_exceedance <= p.delta);
  // The calibration is tight, so the attained delta sits just under target.
  CHECK(report.analytic_exceedance > 0.9 * p.delta);
  CHECK(report.passed);

  // The same sigma does NOT satisfy the stronger loss-exceedance bound; the
  // analytic mechanism is strictly tighter than the tail-bound route.
  CHECK(PrivacyLossExceedance(spec.sigma, 1.0, p.epsilon) > p.delta);
}

TEST_CASE("parallel audit equals the serial reference exactly") {
  const PrivacyParams p{1.0, 1e-2};
  const RedistributionVector r({0.6, 0.3, 0.1});
  const NoiseSpec spec = CalibrateHgm(p, 1.0, r);
  const std::vector<double> shift = AxisAlignedWorstCaseShift(spec, 2);
  const Rng rng(99);
  const AuditReport parallel = MonteCarloAudit(spec, p, shift, 200001, rng);
  const AuditReport serial =
      reference::MonteCarloAudit(spec, p, shift, 200001, rng);
  CHECK(parallel.empirical_exceedance == serial.empirical_exceedance);
  CHECK(parallel.analytic_exceedance == serial.analytic_exceedance);
  CHECK(parallel.passed == serial.passed);
}
