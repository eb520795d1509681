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

#ifndef SECURESGD_DATASET_H_
#define SECURESGD_DATASET_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace securesgd {

// n x d inputs in [-1, 1] with integer class labels.  Rows before
// `train_count` are the training split, the rest the test split.
struct Dataset {
  std::string name;
  int n = 0, d = 0, num_classes = 0;
  int train_count = 0;
  std::vector<double> inputs;  // n x d row-major
  std::vector<int> labels;     // size n

  std::span<const double> Input(int i) const {
    return {inputs.data() + static_cast<std::size_t>(i) * d,
            static_cast<std::size_t>(d)};
  }
  int TestCount() const { return n - train_count; }
};

// Malformed IDX input; `offset` is the byte position of the problem.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::uint64_t offset);
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

// Reads big-endian IDX image/label files (magic 0x00000803 / 0x00000801).
// Pixels are mapped from [0, 255] to [-1, 1] via x / 127.5 - 1.  All rows
// land in the training split; callers move the boundary as needed.
Dataset LoadMnistIdx(const std::string& images_path,
                     const std::string& labels_path);

// k Gaussian blobs with class-dependent means, clamped to [-1, 1].
// Deterministic per seed; linearly separable at the default spread.
// 80% of rows form the training split.
Dataset MakeSynthetic(int n, int d, int k_classes, std::uint64_t seed,
                      double spread = 0.12);

}  // namespace securesgd

#endif  // SECURESGD_DATASET_H_
