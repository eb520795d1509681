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

#include "securesgd/evaluation.h"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace securesgd {
namespace {

// Per-input stream ids inside Evaluate: certification draws, prediction
// draws at each sweep point, and the Madry random start.
constexpr std::uint64_t kCertStream = 0;
constexpr std::uint64_t kPredStream = 1;
constexpr std::uint64_t kAttackStream = 2;

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ExperimentReport Evaluate(const TrainedModel& model, const Dataset& data,
                          const AttackConfig& attack,
                          const std::vector<double>& mu_sweep,
                          const CertParams& cert, std::uint64_t seed,
                          bool parallel) {
  const auto start = std::chrono::steady_clock::now();
  const int n_test = data.TestCount();
  if (n_test < 1) throw std::invalid_argument("empty test split");

  ExperimentReport report;
  report.dataset = data.name;
  report.attack = AttackFamilyName(attack.family);
  report.certification_applicable = model.gamma_enabled;
  report.test_count = n_test;
  report.seed = seed;
  report.cert = cert;

  const Rng root(seed);
  const std::vector<double> gamma = model.FrozenGamma();
  const int n_sweep = static_cast<int>(mu_sweep.size());

  // Per input: mu_max once, then one attacked prediction per sweep point.
  std::vector<double> mu_max(n_test, 0.0);
  std::vector<char> correct(static_cast<std::size_t>(n_test) * n_sweep, 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n_test; ++i) {
    const int row = data.train_count + i;
    const Rng input_rng = root.Split(static_cast<std::uint64_t>(i));
    const std::span<const double> x = data.Input(row);
    const int label = data.labels[row];

    if (model.gamma_enabled) {
      const CertificationResult res =
          Certify(model, x, /*mu_a=*/0.0, cert.n_draws, cert.eta,
                  input_rng.Split(kCertStream), /*parallel=*/false);
      mu_max[i] = res.mu_max;
    }

    for (int s = 0; s < n_sweep; ++s) {
      AttackConfig cfg = attack;
      cfg.mu_a = mu_sweep[s];
      cfg.seed = input_rng.Split(kAttackStream).Split(s).seed();
      const std::vector<double> x_adv =
          cfg.mu_a == 0.0 ? std::vector<double>(x.begin(), x.end())
                          : IteratedAttack(model.model, x, label, cfg, gamma);
      int pred;
      if (model.gamma_enabled) {
        pred = MonteCarloPrediction(model, x_adv, cert.pred_draws,
                                    input_rng.Split(kPredStream).Split(s),
                                    /*parallel=*/false);
      } else {
        pred = ArgMax(Forward(model.model, x_adv, gamma).scores);
      }
      correct[static_cast<std::size_t>(i) * n_sweep + s] = pred == label ? 1 : 0;
    }
  }

  for (int s = 0; s < n_sweep; ++s) {
    EvalRow row;
    row.mu_a = mu_sweep[s];
    int conventional = 0, certified = 0;
    for (int i = 0; i < n_test; ++i) {
      const bool is_correct =
          correct[static_cast<std::size_t>(i) * n_sweep + s] != 0;
      conventional += is_correct ? 1 : 0;
      certified += (is_correct && mu_max[i] >= mu_sweep[s]) ? 1 : 0;
    }
    row.conventional_accuracy = static_cast<double>(conventional) / n_test;
    row.certified_accuracy = model.gamma_enabled
                                 ? static_cast<double>(certified) / n_test
                                 : 0.0;
    report.rows.push_back(row);
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

double CleanAccuracy(const TrainedModel& model, const Dataset& data,
                     const CertParams& cert, std::uint64_t seed,
                     bool parallel) {
  const int n_test = data.TestCount();
  if (n_test < 1) throw std::invalid_argument("empty test split");
  const Rng root(seed);
  int correct = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : correct) if (parallel)
  for (int i = 0; i < n_test; ++i) {
    const int row = data.train_count + i;
    int pred;
    if (model.gamma_enabled) {
      pred = MonteCarloPrediction(model, data.Input(row), cert.pred_draws,
                                  root.Split(i).Split(kPredStream),
                                  /*parallel=*/false);
    } else {
      pred = ArgMax(Forward(model.model, data.Input(row)).scores);
    }
    correct += pred == data.labels[row] ? 1 : 0;
  }
  return static_cast<double>(correct) / n_test;
}

void WriteReportCsv(const ExperimentReport& report, std::ostream& out) {
  out << "# securesgd experiment report\n";
  out << "# desk-scale run: synthetic blobs / small MNIST subsets stand in "
         "for full-dataset benchmarks\n";
  out << "# dataset=" << report.dataset << " attack=" << report.attack
      << " test_count=" << report.test_count << " seed=" << report.seed
      << " n_draws=" << report.cert.n_draws << " eta="
      << FormatDouble(report.cert.eta) << "\n";
  out << "# certification_applicable="
      << (report.certification_applicable ? "yes" : "no") << "\n";
  out << "# runtime_seconds=" << FormatDouble(report.runtime_seconds) << "\n";
  out << "mu_a,conventional_accuracy,certified_accuracy\n";
  for (const EvalRow& row : report.rows) {
    out << FormatDouble(row.mu_a) << ","
        << FormatDouble(row.conventional_accuracy) << ",";
    if (report.certification_applicable) {
      out << FormatDouble(row.certified_accuracy);
    } else {
      out << "na";
    }
    out << "\n";
  }
}

}  // namespace securesgd
