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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "securesgd/attacks.h"
#include "securesgd/checkpoint.h"
#include "securesgd/dataset.h"
#include "securesgd/evaluation.h"
#include "securesgd/mechanisms.h"
#include "securesgd/network.h"
#include "securesgd/privacy_audit.h"
#include "securesgd/robustness.h"
#include "securesgd/secure_sgd.h"

namespace {

using namespace securesgd;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAuditFailure = 3;

// Options shared by the subcommands that read a dataset.
struct DatasetOptions {
  std::string kind = "synthetic";
  int synth_n = 1250;
  int synth_d = 16;
  int synth_classes = 2;
  double synth_spread = 0.12;
  std::uint64_t synth_seed = 7;
  std::string images;
  std::string labels;
  double train_fraction = 0.8;

  void Register(CLI::App* cmd) {
    cmd->add_option("--dataset", kind, "Dataset kind: synthetic or mnist")
        ->check(CLI::IsMember({"synthetic", "mnist"}));
    cmd->add_option("--synth-n", synth_n, "Synthetic: number of rows");
    cmd->add_option("--synth-d", synth_d, "Synthetic: input dimension");
    cmd->add_option("--synth-classes", synth_classes, "Synthetic: classes");
    cmd->add_option("--synth-spread", synth_spread, "Synthetic: blob spread");
    cmd->add_option("--synth-seed", synth_seed, "Synthetic: generator seed");
    cmd->add_option("--images", images, "MNIST: IDX image file");
    cmd->add_option("--labels", labels, "MNIST: IDX label file");
    cmd->add_option("--train-fraction", train_fraction,
                    "Fraction of rows tagged as the training split");
  }

  std::string Resolve(const std::string& path) const {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("SECURESGD_DATA_DIR");
    if (dir == nullptr) return path;
    return std::string(dir) + "/" + path;
  }

  Dataset Load() const {
    if (kind == "synthetic") {
      return MakeSynthetic(synth_n, synth_d, synth_classes, synth_seed,
                           synth_spread);
    }
    Dataset ds = LoadMnistIdx(Resolve(images), Resolve(labels));
    ds.train_count = static_cast<int>(ds.n * train_fraction);
    return ds;
  }
};

// Flat key=value config support.  CLI11's config hooks only fire on the top
// level app, so `--config <file>` is expanded here before parsing: every
// `key=value` (or `key value`) line becomes `--key=value`, appended only
// when the flag is absent from the command line, which keeps the
// flags-override-file rule.  `#` starts a comment; whitespace-separated
// values expand to repeated flags for vector options.
std::vector<std::string> SpliceConfigArgs(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (config_path.empty()) return args;
  std::ifstream in(config_path);
  if (!in) throw FormatError("cannot open config " + config_path, 0);

  const auto have_flag = [&args](const std::string& flag) {
    for (const std::string& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::string line;
  while (std::getline(in, line)) {
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.resize(comment);
    std::string key, rest;
    const std::size_t eq = line.find('=');
    if (eq != std::string::npos) {
      key = line.substr(0, eq);
      rest = line.substr(eq + 1);
    } else {
      std::istringstream ss(line);
      ss >> key;
      std::getline(ss, rest);
    }
    const auto trim = [](std::string& s) {
      const std::size_t from = s.find_first_not_of(" \t\r");
      const std::size_t to = s.find_last_not_of(" \t\r");
      s = from == std::string::npos ? "" : s.substr(from, to - from + 1);
    };
    trim(key);
    trim(rest);
    if (key.empty() || rest.empty()) continue;
    const std::string flag = "--" + key;
    if (have_flag(flag)) continue;
    std::istringstream values(rest);
    std::string value;
    while (values >> value) args.push_back(flag + "=" + value);
  }
  return args;
}

std::unique_ptr<std::ostream> OpenOutput(const std::string& path,
                                         std::ostream*& out) {
  if (path.empty()) {
    out = &std::cout;
    return nullptr;
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw FormatError("cannot open output " + path, 0);
  out = file.get();
  return file;
}

int RunCalibrate(double eps_min, double eps_max, int eps_steps, double delta,
                 double sensitivity, const std::string& out_path) {
  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  *out << "epsilon,delta,sensitivity,sigma_classic,sigma_extended,"
          "sigma_analytic\n";
  for (int i = 0; i < eps_steps; ++i) {
    const double eps =
        eps_steps == 1
            ? eps_min
            : eps_min + (eps_max - eps_min) * i / (eps_steps - 1);
    const PrivacyParams p{eps, delta};
    const std::string classic =
        eps <= 1.0 ? FormatDouble(CalibrateClassic(p, sensitivity)) : "nan";
    *out << FormatDouble(eps) << "," << FormatDouble(delta) << ","
         << FormatDouble(sensitivity) << "," << classic << ","
         << FormatDouble(CalibrateExtended(p, sensitivity)) << ","
         << FormatDouble(CalibrateAnalytic(p, sensitivity)) << "\n";
  }
  return 0;
}

int RunAudit(const std::string& mechanism_name, double epsilon, double delta,
             double sensitivity, std::int64_t samples, std::uint64_t seed,
             int k, const std::vector<double>& r_weights, double sigma_override,
             const std::string& out_path) {
  const Mechanism mechanism = MechanismFromName(mechanism_name);
  const PrivacyParams p{epsilon, delta};
  RedistributionVector r = r_weights.empty()
                               ? RedistributionVector::Uniform(k)
                               : RedistributionVector(r_weights);
  NoiseSpec spec;
  spec.mechanism = mechanism;
  spec.sensitivity = sensitivity;
  spec.r = r;
  spec.k = r.size();
  switch (mechanism) {
    case Mechanism::kClassic:
      spec.sigma = CalibrateClassic(p, sensitivity);
      break;
    case Mechanism::kExtended:
      spec.sigma = CalibrateExtended(p, sensitivity);
      break;
    case Mechanism::kHeterogeneous:
      spec = CalibrateHgm(p, sensitivity, r);
      break;
    case Mechanism::kAnalytic:
      spec.sigma = CalibrateAnalytic(p, sensitivity);
      break;
  }
  if (sigma_override > 0.0) spec.sigma = sigma_override;
  const std::vector<double> shift = AxisAlignedWorstCaseShift(spec, 0);
  const AuditReport report =
      MonteCarloAudit(spec, p, shift, samples, Rng(seed));

  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  *out << "mechanism,epsilon,delta,sensitivity,samples,analytic_exceedance,"
          "empirical_exceedance,passed\n";
  *out << MechanismName(report.mechanism) << ","
       << FormatDouble(report.epsilon) << "," << FormatDouble(report.delta)
       << "," << FormatDouble(sensitivity) << "," << report.samples << ","
       << FormatDouble(report.analytic_exceedance) << ","
       << FormatDouble(report.empirical_exceedance) << ","
       << (report.passed ? 1 : 0) << "\n";
  return report.passed ? 0 : kExitAuditFailure;
}

struct TrainOptions {
  DatasetOptions data;
  int hidden = 64;
  int batch_size = 32;
  double learning_rate = 0.25;
  double clip_norm = 1.0;
  double grad_noise_scale = 1.0;
  double epsilon = 1.0;
  double delta = 1e-5;
  double eps_r = 1.0;
  double delta_r = 1e-5;
  double beta = 1.0;
  int steps = 300;
  std::uint64_t seed = 0;
  std::string mechanism = "hgm";
  bool baseline = false;
  bool gamma_redraw = false;
  std::string norm = "linf";
  int pretrain_steps = 200;
  double pretrain_learning_rate = 0.5;
  std::string out = "model.ckpt";
  std::string log_path;

  void Register(CLI::App* cmd) {
    data.Register(cmd);
    cmd->add_option("--hidden", hidden, "First hidden layer width K");
    cmd->add_option("--batch-size", batch_size, "Batch size m");
    cmd->add_option("--learning-rate", learning_rate, "Learning rate xi");
    cmd->add_option("--clip-norm", clip_norm, "Gradient norm bound C");
    cmd->add_option("--noise-scale", grad_noise_scale,
                    "Gradient noise scale sigma");
    cmd->add_option("--epsilon", epsilon, "Data privacy budget");
    cmd->add_option("--delta", delta, "Data privacy broken probability");
    cmd->add_option("--eps-r", eps_r, "Robustness budget");
    cmd->add_option("--delta-r", delta_r, "Robustness broken probability");
    cmd->add_option("--beta", beta, "Redistribution inflation rate");
    cmd->add_option("--steps", steps, "Training steps T");
    cmd->add_option("--seed", seed, "Training seed");
    cmd->add_option("--mechanism", mechanism,
                    "Robustness noise mechanism: hgm, agm or extended")
        ->check(CLI::IsMember({"hgm", "agm", "extended"}));
    cmd->add_flag("--baseline", baseline,
                  "Train the DPSGD baseline (no robustness noise)");
    cmd->add_flag("--gamma-redraw", gamma_redraw,
                  "Redraw the robustness noise every step");
    cmd->add_option("--norm", norm, "Sensitivity norm: l1, l2 or linf")
        ->check(CLI::IsMember({"l1", "l2", "linf"}));
    cmd->add_option("--pretrain-steps", pretrain_steps,
                    "Preprocessing SGD steps");
    cmd->add_option("--pretrain-learning-rate", pretrain_learning_rate,
                    "Preprocessing learning rate");
    cmd->add_option("--out", out, "Checkpoint output path");
    cmd->add_option("--log", log_path, "Progress CSV (step,loss,grad_norm_mean)");
  }

  TrainConfig MakeConfig(const Dataset& ds) const {
    TrainConfig config;
    config.arch.dense = {DenseSpec{ds.d, hidden},
                         DenseSpec{hidden, ds.num_classes}};
    config.batch_size = batch_size;
    config.learning_rate = learning_rate;
    config.clip_norm = clip_norm;
    config.grad_noise_scale = grad_noise_scale;
    config.data_privacy = {epsilon, delta};
    config.robustness = {eps_r, delta_r};
    config.inflation_rate = beta;
    config.steps = steps;
    config.seed = seed;
    config.gamma_mechanism = GammaMechanismFromName(mechanism);
    config.gamma_enabled = !baseline;
    config.gamma_redraw_per_step = gamma_redraw;
    config.sensitivity_norm = NormKindFromName(norm);
    config.pretrain_steps = pretrain_steps;
    config.pretrain_learning_rate = pretrain_learning_rate;
    return config;
  }
};

int RunTrain(const TrainOptions& opt) {
  const Dataset ds = opt.data.Load();
  const TrainConfig config = opt.MakeConfig(ds);
  TrainRecorder recorder;
  recorder.record_loss = !opt.log_path.empty();
  recorder.record_clipped_norms = !opt.log_path.empty();
  const TrainedModel model =
      Train(config, ds, opt.log_path.empty() ? nullptr : &recorder);
  SaveCheckpoint(model, opt.out);
  if (!opt.log_path.empty()) {
    std::ofstream log(opt.log_path);
    if (!log) throw FormatError("cannot open log " + opt.log_path, 0);
    log << "step,loss,grad_norm_mean\n";
    for (std::size_t t = 0; t < recorder.mean_loss.size(); ++t) {
      double norm_mean = 0.0;
      for (double v : recorder.clipped_norms[t]) norm_mean += v;
      norm_mean /= recorder.clipped_norms[t].size();
      log << t << "," << FormatDouble(recorder.mean_loss[t]) << ","
          << FormatDouble(norm_mean) << "\n";
    }
  }
  std::cerr << "saved checkpoint to " << opt.out << " (delta_f="
            << FormatDouble(model.delta_f)
            << ", sigma_r=" << FormatDouble(model.gamma_spec.sigma) << ")\n";
  return 0;
}

int RunCertify(const std::string& model_path, const DatasetOptions& data_opt,
               double mu_a, int n_draws, double eta, std::uint64_t seed,
               int limit, const std::string& out_path) {
  const TrainedModel model = LoadCheckpoint(model_path);
  const Dataset ds = data_opt.Load();
  const Rng root(seed);
  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  *out << "index,label,mu_max,is_robust\n";
  const int n = limit > 0 ? std::min(limit, ds.TestCount()) : ds.TestCount();
  for (int i = 0; i < n; ++i) {
    const int row = ds.train_count + i;
    const CertificationResult res =
        Certify(model, ds.Input(row), mu_a, n_draws, eta, root.Split(i));
    *out << i << "," << res.label << "," << FormatDouble(res.mu_max) << ","
         << (res.is_robust ? 1 : 0) << "\n";
  }
  return 0;
}

int RunAttackCmd(const std::string& model_path, const DatasetOptions& data_opt,
                 const std::string& family, double mu_a, int steps,
                 double momentum_decay, std::uint64_t seed,
                 const std::string& split, int limit,
                 const std::string& out_path) {
  const TrainedModel model = LoadCheckpoint(model_path);
  const Dataset ds = data_opt.Load();
  AttackConfig config;
  config.family = AttackFamilyFromName(family);
  config.mu_a = mu_a;
  config.steps = steps;
  config.momentum_decay = momentum_decay;
  const std::vector<double> gamma = model.FrozenGamma();
  const Rng root(seed);

  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  *out << "index,true_label,pred_clean,pred_adv,linf_dist\n";
  const int begin = split == "train" ? 0 : ds.train_count;
  const int count = split == "train" ? ds.train_count : ds.TestCount();
  const int n = limit > 0 ? std::min(limit, count) : count;
  for (int i = 0; i < n; ++i) {
    const int row = begin + i;
    config.seed = root.Split(i).seed();
    const std::span<const double> x = ds.Input(row);
    const std::vector<double> x_adv =
        IteratedAttack(model.model, x, ds.labels[row], config, gamma);
    const int pred_clean = ArgMax(Forward(model.model, x, gamma).scores);
    const int pred_adv = ArgMax(Forward(model.model, x_adv, gamma).scores);
    *out << i << "," << ds.labels[row] << "," << pred_clean << "," << pred_adv
         << "," << FormatDouble(LinfDistance(x, x_adv)) << "\n";
  }
  return 0;
}

int RunEvaluate(const std::string& model_path, const DatasetOptions& data_opt,
                const std::string& family, int steps,
                std::vector<double> mu_sweep, int n_draws, double eta,
                std::uint64_t seed, const std::string& out_path) {
  const TrainedModel model = LoadCheckpoint(model_path);
  const Dataset ds = data_opt.Load();
  AttackConfig attack;
  attack.family = AttackFamilyFromName(family);
  attack.steps = steps;
  if (mu_sweep.empty()) {
    for (double mu = 0.05; mu <= 0.5001; mu += 0.05) mu_sweep.push_back(mu);
  }
  const ExperimentReport report = Evaluate(
      model, ds, attack, mu_sweep, CertParams{n_draws, eta}, seed);
  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  WriteReportCsv(report, *out);
  return 0;
}

int RunReport(const TrainOptions& opt, const std::string& family, int steps,
              const std::vector<double>& mu_sweep, int n_draws, double eta,
              std::uint64_t eval_seed, const std::string& out_path) {
  const Dataset ds = opt.data.Load();
  const TrainConfig config = opt.MakeConfig(ds);
  const TrainedModel model = Train(config, ds);
  AttackConfig attack;
  attack.family = AttackFamilyFromName(family);
  attack.steps = steps;
  std::vector<double> sweep = mu_sweep;
  if (sweep.empty()) {
    for (double mu = 0.05; mu <= 0.5001; mu += 0.05) sweep.push_back(mu);
  }
  const ExperimentReport report =
      Evaluate(model, ds, attack, sweep, CertParams{n_draws, eta}, eval_seed);
  std::ostream* out = nullptr;
  auto holder = OpenOutput(out_path, out);
  WriteReportCsv(report, *out);
  if (!opt.out.empty()) SaveCheckpoint(model, opt.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-mechanism calibration, Secure-SGD training and "
               "certified-robustness toolkit"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Noise-scale curves over an epsilon grid (CSV)");
  double eps_min = 0.1, eps_max = 3.0, delta = 1e-5, sensitivity = 1.0;
  int eps_steps = 30;
  std::string calibrate_out;
  calibrate->add_option("--eps-min", eps_min, "Grid start");
  calibrate->add_option("--eps-max", eps_max, "Grid end");
  calibrate->add_option("--eps-steps", eps_steps, "Grid size");
  calibrate->add_option("--delta", delta, "Broken probability");
  calibrate->add_option("--sensitivity", sensitivity, "l2 sensitivity");
  calibrate->add_option("--out", calibrate_out, "Output CSV (default stdout)");
  std::string calibrate_config;
  calibrate->add_option("--config", calibrate_config, "Flat key=value config file");

  // audit
  auto* audit = app.add_subcommand(
      "audit", "Verify a calibrated mechanism's (epsilon, delta) guarantee");
  std::string audit_mechanism = "extended";
  double audit_eps = 1.0, audit_delta = 1e-2, audit_sensitivity = 1.0;
  std::int64_t audit_samples = 1000000;
  std::uint64_t audit_seed = 0;
  int audit_k = 4;
  std::vector<double> audit_r;
  double audit_sigma = 0.0;
  std::string audit_out;
  audit->add_option("--mechanism", audit_mechanism,
                    "classic, extended, heterogeneous or analytic");
  audit->add_option("--epsilon", audit_eps, "Privacy budget");
  audit->add_option("--delta", audit_delta, "Broken probability");
  audit->add_option("--sensitivity", audit_sensitivity, "l2 sensitivity");
  audit->add_option("--samples", audit_samples, "Monte-Carlo samples");
  audit->add_option("--seed", audit_seed, "RNG seed");
  audit->add_option("--k", audit_k, "Output dimension K");
  audit->add_option("--r", audit_r, "Redistribution weights (heterogeneous)");
  audit->add_option("--sigma", audit_sigma,
                    "Audit this noise scale instead of the calibrated one");
  audit->add_option("--out", audit_out, "Output CSV (default stdout)");
  std::string audit_config;
  audit->add_option("--config", audit_config, "Flat key=value config file");

  // train
  auto* train = app.add_subcommand("train", "Secure-SGD / DPSGD training");
  TrainOptions train_opt;
  train_opt.Register(train);
  std::string train_config;
  train->add_option("--config", train_config, "Flat key=value config file");

  // certify
  auto* certify = app.add_subcommand(
      "certify", "Certify test inputs of a trained model (CSV per input)");
  std::string certify_model = "model.ckpt", certify_out;
  DatasetOptions certify_data;
  double certify_mu_a = 0.1, certify_eta = 0.95;
  int certify_draws = 300, certify_limit = 0;
  std::uint64_t certify_seed = 0;
  certify->add_option("--model", certify_model, "Checkpoint path")->required();
  certify_data.Register(certify);
  certify->add_option("--mu-a", certify_mu_a, "Attack size to certify against");
  certify->add_option("--n-draws", certify_draws, "Monte-Carlo draws N");
  certify->add_option("--eta", certify_eta, "Confidence");
  certify->add_option("--seed", certify_seed, "RNG seed");
  certify->add_option("--limit", certify_limit, "Max inputs (0 = all)");
  certify->add_option("--out", certify_out, "Output CSV (default stdout)");
  std::string certify_config;
  certify->add_option("--config", certify_config, "Flat key=value config file");

  // attack
  auto* attack = app.add_subcommand("attack", "Run a white-box attack (CSV)");
  std::string attack_model = "model.ckpt", attack_family = "fgsm";
  std::string attack_split = "test", attack_out;
  DatasetOptions attack_data;
  double attack_mu_a = 0.1, attack_decay = 1.0;
  int attack_steps = 10, attack_limit = 0;
  std::uint64_t attack_seed = 0;
  attack->add_option("--model", attack_model, "Checkpoint path")->required();
  attack_data.Register(attack);
  attack->add_option("--family", attack_family, "fgsm, ifgsm, mim or madry");
  attack->add_option("--mu-a", attack_mu_a, "l-infinity radius");
  attack->add_option("--steps", attack_steps, "Iterations T_mu");
  attack->add_option("--momentum-decay", attack_decay, "MIM decay");
  attack->add_option("--seed", attack_seed, "RNG seed");
  attack->add_option("--dataset-split", attack_split, "train or test")
      ->check(CLI::IsMember({"train", "test"}));
  attack->add_option("--limit", attack_limit, "Max inputs (0 = all)");
  attack->add_option("--out", attack_out, "Output CSV (default stdout)");
  std::string attack_config;
  attack->add_option("--config", attack_config, "Flat key=value config file");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Conventional and certified accuracy over a mu_a sweep");
  std::string eval_model = "model.ckpt", eval_family = "madry", eval_out;
  DatasetOptions eval_data;
  std::vector<double> eval_sweep;
  int eval_steps = 10, eval_draws = 300;
  double eval_eta = 0.95;
  std::uint64_t eval_seed = 0;
  evaluate->add_option("--model", eval_model, "Checkpoint path")->required();
  eval_data.Register(evaluate);
  evaluate->add_option("--family", eval_family, "Attack family");
  evaluate->add_option("--steps", eval_steps, "Attack iterations");
  evaluate->add_option("--mu-sweep", eval_sweep, "mu_a sweep values");
  evaluate->add_option("--n-draws", eval_draws, "Monte-Carlo draws N");
  evaluate->add_option("--eta", eval_eta, "Confidence");
  evaluate->add_option("--seed", eval_seed, "RNG seed");
  evaluate->add_option("--out", eval_out, "Output CSV (default stdout)");
  std::string evaluate_config;
  evaluate->add_option("--config", evaluate_config, "Flat key=value config file");

  // report
  auto* report = app.add_subcommand(
      "report", "Train and evaluate in one run, emitting the experiment CSV");
  TrainOptions report_opt;
  report_opt.out = "";
  report_opt.Register(report);
  std::string report_family = "madry", report_out;
  std::vector<double> report_sweep;
  int report_steps = 10, report_draws = 300;
  double report_eta = 0.95;
  std::uint64_t report_eval_seed = 0;
  report->add_option("--family", report_family, "Attack family");
  report->add_option("--attack-steps", report_steps, "Attack iterations");
  report->add_option("--mu-sweep", report_sweep, "mu_a sweep values");
  report->add_option("--n-draws", report_draws, "Monte-Carlo draws N");
  report->add_option("--eta", report_eta, "Confidence");
  report->add_option("--eval-seed", report_eval_seed, "Evaluation seed");
  report->add_option("--report-out", report_out, "Output CSV (default stdout)");
  std::string report_config;
  report->add_option("--config", report_config, "Flat key=value config file");

  try {
    std::vector<std::string> args = SpliceConfigArgs(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 wants back-to-front
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }

  try {
    if (calibrate->parsed()) {
      return RunCalibrate(eps_min, eps_max, eps_steps, delta, sensitivity,
                          calibrate_out);
    }
    if (audit->parsed()) {
      return RunAudit(audit_mechanism, audit_eps, audit_delta,
                      audit_sensitivity, audit_samples, audit_seed, audit_k,
                      audit_r, audit_sigma, audit_out);
    }
    if (train->parsed()) return RunTrain(train_opt);
    if (certify->parsed()) {
      return RunCertify(certify_model, certify_data, certify_mu_a,
                        certify_draws, certify_eta, certify_seed,
                        certify_limit, certify_out);
    }
    if (attack->parsed()) {
      return RunAttackCmd(attack_model, attack_data, attack_family,
                          attack_mu_a, attack_steps, attack_decay, attack_seed,
                          attack_split, attack_limit, attack_out);
    }
    if (evaluate->parsed()) {
      return RunEvaluate(eval_model, eval_data, eval_family, eval_steps,
                         eval_sweep, eval_draws, eval_eta, eval_seed, eval_out);
    }
    if (report->parsed()) {
      return RunReport(report_opt, report_family, report_steps, report_sweep,
                       report_draws, report_eta, report_eval_seed, report_out);
    }
  } catch (const FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
