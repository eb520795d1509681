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

#include "securesgd/checkpoint.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace securesgd {
namespace {

constexpr const char* kMagic = "securesgd_checkpoint_v1";

std::string HexDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double ParseHexDouble(const std::string& token) {
  return std::strtod(token.c_str(), nullptr);
}

class LineReader {
 public:
  explicit LineReader(const std::string& path) : in_(path) {
    if (!in_) throw std::runtime_error("cannot open checkpoint " + path);
  }

  // Next non-empty line split into tokens; first token must equal `key`.
  std::vector<std::string> Expect(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      if (line.empty()) continue;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (tokens.empty()) continue;
      if (tokens.front() != key) {
        throw std::runtime_error("checkpoint: expected '" + key + "', got '" +
                                 tokens.front() + "'");
      }
      return tokens;
    }
    throw std::runtime_error("checkpoint: unexpected end of file, wanted " + key);
  }

 private:
  std::ifstream in_;
};

void WriteVector(std::ostream& out, const std::string& key,
                 const std::vector<double>& v) {
  out << key << " " << v.size();
  for (double x : v) out << " " << HexDouble(x);
  out << "\n";
}

std::vector<double> ReadVector(LineReader& reader, const std::string& key) {
  const std::vector<std::string> tokens = reader.Expect(key);
  if (tokens.size() < 2) throw std::runtime_error("checkpoint: bad " + key);
  const std::size_t count = std::stoull(tokens[1]);
  if (tokens.size() != count + 2) {
    throw std::runtime_error("checkpoint: wrong count for " + key);
  }
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = ParseHexDouble(tokens[i + 2]);
  return v;
}

}  // namespace

void SaveCheckpoint(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  const Architecture& arch = model.model.arch();
  out << kMagic << "\n";
  if (arch.conv) {
    const ConvSpec& c = *arch.conv;
    out << "conv " << c.in_h << " " << c.in_w << " " << c.in_c << " "
        << c.out_c << " " << c.k_h << " " << c.k_w << " " << c.stride << "\n";
  } else {
    out << "conv none\n";
  }
  out << "dense_layers " << arch.dense.size();
  for (const DenseSpec& d : arch.dense) out << " " << d.in << " " << d.out;
  out << "\n";
  WriteVector(out, "theta", model.model.theta());
  out << "gamma_enabled " << (model.gamma_enabled ? 1 : 0) << "\n";
  out << "gamma_mechanism " << MechanismName(model.gamma_spec.mechanism) << "\n";
  out << "gamma_sigma " << HexDouble(model.gamma_spec.sigma) << "\n";
  out << "gamma_sensitivity " << HexDouble(model.gamma_spec.sensitivity) << "\n";
  out << "gamma_seed " << model.gamma_seed << "\n";
  WriteVector(out, "r", model.r.values());
  out << "delta_f " << HexDouble(model.delta_f) << "\n";
  out << "delta_f_calibration " << HexDouble(model.delta_f_calibration) << "\n";
  out << "sensitivity_norm " << NormKindName(model.sensitivity_norm) << "\n";
  out << "eps_r " << HexDouble(model.robustness_budget.epsilon) << "\n";
  out << "delta_r " << HexDouble(model.robustness_budget.delta) << "\n";
  out << "acct_noise_scale " << HexDouble(model.accounting.noise_scale) << "\n";
  out << "acct_clip_norm " << HexDouble(model.accounting.clip_norm) << "\n";
  out << "acct_sample_rate " << HexDouble(model.accounting.sample_rate) << "\n";
  out << "acct_steps " << model.accounting.steps << "\n";
  out << "train_seed " << model.train_seed << "\n";
  if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

TrainedModel LoadCheckpoint(const std::string& path) {
  LineReader reader(path);
  reader.Expect(kMagic);

  Architecture arch;
  {
    const std::vector<std::string> tokens = reader.Expect("conv");
    if (tokens.size() == 2 && tokens[1] == "none") {
      // dense first layer
    } else if (tokens.size() == 8) {
      ConvSpec c;
      c.in_h = std::stoi(tokens[1]);
      c.in_w = std::stoi(tokens[2]);
      c.in_c = std::stoi(tokens[3]);
      c.out_c = std::stoi(tokens[4]);
      c.k_h = std::stoi(tokens[5]);
      c.k_w = std::stoi(tokens[6]);
      c.stride = std::stoi(tokens[7]);
      arch.conv = c;
    } else {
      throw std::runtime_error("checkpoint: bad conv line");
    }
  }
  {
    const std::vector<std::string> tokens = reader.Expect("dense_layers");
    const int count = std::stoi(tokens.at(1));
    if (static_cast<int>(tokens.size()) != 2 + 2 * count) {
      throw std::runtime_error("checkpoint: bad dense_layers line");
    }
    for (int l = 0; l < count; ++l) {
      arch.dense.push_back(DenseSpec{.in = std::stoi(tokens[2 + 2 * l]),
                                     .out = std::stoi(tokens[3 + 2 * l])});
    }
  }

  Model model(arch);
  {
    std::vector<double> theta = ReadVector(reader, "theta");
    if (theta.size() != model.theta().size()) {
      throw std::runtime_error("checkpoint: theta size mismatch");
    }
    model.theta() = std::move(theta);
  }

  const bool gamma_enabled = std::stoi(reader.Expect("gamma_enabled").at(1)) != 0;
  const Mechanism mechanism =
      MechanismFromName(reader.Expect("gamma_mechanism").at(1));
  const double gamma_sigma = ParseHexDouble(reader.Expect("gamma_sigma").at(1));
  const double gamma_sensitivity =
      ParseHexDouble(reader.Expect("gamma_sensitivity").at(1));
  const std::uint64_t gamma_seed =
      std::stoull(reader.Expect("gamma_seed").at(1));
  std::vector<double> r_values = ReadVector(reader, "r");

  TrainedModel out{.model = std::move(model)};
  out.gamma_enabled = gamma_enabled;
  out.r = RedistributionVector(std::move(r_values));
  out.gamma_spec = NoiseSpec{.mechanism = mechanism,
                             .sigma = gamma_sigma,
                             .sensitivity = gamma_sensitivity,
                             .r = out.r,
                             .k = out.r.size()};
  if (mechanism == Mechanism::kAnalytic) {
    out.gamma_spec.r = RedistributionVector::Uniform(out.r.size());
  }
  out.gamma_seed = gamma_seed;
  out.delta_f = ParseHexDouble(reader.Expect("delta_f").at(1));
  out.delta_f_calibration =
      ParseHexDouble(reader.Expect("delta_f_calibration").at(1));
  out.sensitivity_norm = NormKindFromName(reader.Expect("sensitivity_norm").at(1));
  out.robustness_budget.epsilon = ParseHexDouble(reader.Expect("eps_r").at(1));
  out.robustness_budget.delta = ParseHexDouble(reader.Expect("delta_r").at(1));
  out.accounting.noise_scale =
      ParseHexDouble(reader.Expect("acct_noise_scale").at(1));
  out.accounting.clip_norm =
      ParseHexDouble(reader.Expect("acct_clip_norm").at(1));
  out.accounting.sample_rate =
      ParseHexDouble(reader.Expect("acct_sample_rate").at(1));
  out.accounting.steps = std::stoi(reader.Expect("acct_steps").at(1));
  out.train_seed = std::stoull(reader.Expect("train_seed").at(1));
  return out;
}

}  // namespace securesgd
