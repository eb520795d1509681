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

#ifndef SECURESGD_RNG_H_
#define SECURESGD_RNG_H_

#include <array>
#include <cstdint>

namespace securesgd {

// Deterministic, cross-platform xoshiro256++ generator seeded through
// splitmix64.  Gaussian variates use the inverse-CDF method (one uniform
// per normal), so a fixed seed reproduces byte-identical streams on every
// platform and build.
//
// Stream splitting: Split(id) derives an independent generator from the
// ORIGINAL seed of this instance and the stream id, not from the current
// state.  Parallel workers each take Split(worker_index) of a shared base
// generator; the resulting draws do not depend on scheduling order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (original seed, stream id).
  Rng Split(std::uint64_t stream_id) const;

  std::uint64_t NextUint64();

  // Uniform in the open interval (0, 1).
  double NextUniform();

  // Uniform in [lo, hi).
  double NextUniform(double lo, double hi);

  // Standard normal via the inverse CDF applied to NextUniform().
  double NextGaussian();

  // Uniform integer in [0, n), n > 0.  Uses modulo reduction; the bias is
  // below 2^-50 for any n that fits a dataset index.
  std::uint64_t NextIndex(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
};

}  // namespace securesgd

#endif  // SECURESGD_RNG_H_
