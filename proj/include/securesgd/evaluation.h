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

#ifndef SECURESGD_EVALUATION_H_
#define SECURESGD_EVALUATION_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "securesgd/attacks.h"
#include "securesgd/dataset.h"
#include "securesgd/robustness.h"
#include "securesgd/secure_sgd.h"

namespace securesgd {

struct CertParams {
  int n_draws = 300;     // certification draws per input
  double eta = 0.95;
  int pred_draws = 300;  // draws behind each Monte-Carlo prediction
};

struct EvalRow {
  double mu_a = 0.0;
  double conventional_accuracy = 0.0;  // correct under attack
  double certified_accuracy = 0.0;     // correct under attack AND mu_max >= mu_a
};

struct ExperimentReport {
  std::string dataset;
  std::string attack;
  bool certification_applicable = false;
  int test_count = 0;
  std::uint64_t seed = 0;
  CertParams cert;
  std::vector<EvalRow> rows;
  double runtime_seconds = 0.0;  // excluded from the CSV body
};

// Runs the attack at every mu_a in the sweep over the test split and applies
// the two accuracy metrics.  A prediction is the argmax of the Monte-Carlo
// mean score for gamma-enabled models and the deterministic argmax
// otherwise; certification runs once per input (mu_max does not depend on
// mu_a).  For a gamma-free baseline, certified accuracy is reported as
// not applicable and only the conventional metric is produced.
ExperimentReport Evaluate(const TrainedModel& model, const Dataset& data,
                          const AttackConfig& attack,
                          const std::vector<double>& mu_sweep,
                          const CertParams& cert, std::uint64_t seed,
                          bool parallel = true);

// Clean accuracy of the Monte-Carlo mean prediction on the test split.
double CleanAccuracy(const TrainedModel& model, const Dataset& data,
                     const CertParams& cert, std::uint64_t seed,
                     bool parallel = true);

// Deterministic CSV body: `mu_a,conventional_accuracy,certified_accuracy`
// after `#`-prefixed header comments echoing the configuration.  Runtime
// metadata lives in the comments and never in the body.
void WriteReportCsv(const ExperimentReport& report, std::ostream& out);

// Shortest round-trippable decimal form, stable across reruns.
std::string FormatDouble(double v);

}  // namespace securesgd

#endif  // SECURESGD_EVALUATION_H_
