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

#include "securesgd/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "securesgd/rng.h"

namespace securesgd {
namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

class IdxReader {
 public:
  explicit IdxReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path, 0);
  }

  std::uint32_t ReadU32() {
    unsigned char buf[4];
    in_.read(reinterpret_cast<char*>(buf), 4);
    if (in_.gcount() != 4) {
      throw FormatError("truncated header in " + path_, offset_);
    }
    offset_ += 4;
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) |
           (std::uint32_t{buf[2]} << 8) | std::uint32_t{buf[3]};
  }

  void ReadBytes(std::vector<unsigned char>& out, std::size_t count) {
    out.resize(count);
    in_.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in_.gcount()) != count) {
      throw FormatError("truncated payload in " + path_,
                        offset_ + static_cast<std::uint64_t>(in_.gcount()));
    }
    offset_ += count;
  }

  std::uint64_t offset() const { return offset_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::uint64_t offset_ = 0;
};

}  // namespace

FormatError::FormatError(const std::string& message, std::uint64_t offset)
    : std::runtime_error(message + " (offset " + std::to_string(offset) + ")"),
      offset_(offset) {}

Dataset LoadMnistIdx(const std::string& images_path,
                     const std::string& labels_path) {
  IdxReader images(images_path);
  const std::uint32_t images_magic = images.ReadU32();
  if (images_magic != kImagesMagic) {
    throw FormatError("bad image magic in " + images_path, 0);
  }
  const std::uint32_t count = images.ReadU32();
  const std::uint32_t rows = images.ReadU32();
  const std::uint32_t cols = images.ReadU32();

  IdxReader labels(labels_path);
  const std::uint32_t labels_magic = labels.ReadU32();
  if (labels_magic != kLabelsMagic) {
    throw FormatError("bad label magic in " + labels_path, 0);
  }
  const std::uint32_t label_count = labels.ReadU32();
  if (label_count != count) {
    throw FormatError("image/label count mismatch in " + labels_path, 4);
  }

  Dataset ds;
  ds.name = "mnist";
  ds.n = static_cast<int>(count);
  ds.d = static_cast<int>(rows * cols);
  ds.num_classes = 10;
  ds.train_count = ds.n;

  std::vector<unsigned char> pixel_bytes;
  images.ReadBytes(pixel_bytes, static_cast<std::size_t>(count) * rows * cols);
  ds.inputs.resize(pixel_bytes.size());
  for (std::size_t i = 0; i < pixel_bytes.size(); ++i) {
    ds.inputs[i] = static_cast<double>(pixel_bytes[i]) / 127.5 - 1.0;
  }

  std::vector<unsigned char> label_bytes;
  labels.ReadBytes(label_bytes, count);
  ds.labels.resize(count);
  for (std::size_t i = 0; i < label_bytes.size(); ++i) {
    ds.labels[i] = static_cast<int>(label_bytes[i]);
    if (ds.labels[i] > 9) {
      throw FormatError("label out of range in " + labels_path, 8 + i);
    }
  }
  return ds;
}

Dataset MakeSynthetic(int n, int d, int k_classes, std::uint64_t seed,
                      double spread) {
  if (n < 1 || d < 1 || k_classes < 2) {
    throw std::invalid_argument("MakeSynthetic: need n >= 1, d >= 1, k >= 2");
  }
  Rng rng(seed);
  Rng means_rng = rng.Split(0);
  Rng sample_rng = rng.Split(1);

  // Class means drawn in [-0.6, 0.6]^d, redrawn until pairwise separated by
  // at least 6 spreads (and at least 1.0 where the box permits) so the
  // default configuration is linearly separable with wide margins.
  std::vector<std::vector<double>> means;
  const double min_gap = std::max(6.0 * spread, 1.0);
  for (int c = 0; c < k_classes; ++c) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<double> m(d);
      for (double& v : m) v = means_rng.NextUniform(-0.6, 0.6);
      bool ok = true;
      for (const auto& other : means) {
        double dist = 0.0;
        for (int j = 0; j < d; ++j) dist += (m[j] - other[j]) * (m[j] - other[j]);
        if (std::sqrt(dist) < min_gap) {
          ok = false;
          break;
        }
      }
      if (ok || attempt == 999) {
        means.push_back(std::move(m));
        break;
      }
    }
  }

  Dataset ds;
  ds.name = "synthetic";
  ds.n = n;
  ds.d = d;
  ds.num_classes = k_classes;
  ds.train_count = std::max(1, (n * 4) / 5);
  ds.inputs.resize(static_cast<std::size_t>(n) * d);
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = i % k_classes;
    ds.labels[i] = c;
    for (int j = 0; j < d; ++j) {
      const double v = means[c][j] + spread * sample_rng.NextGaussian();
      ds.inputs[static_cast<std::size_t>(i) * d + j] =
          std::clamp(v, -1.0, 1.0);
    }
  }
  return ds;
}

}  // namespace securesgd
