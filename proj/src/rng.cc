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

#include "securesgd/rng.h"

#include "securesgd/normal.h"

namespace securesgd {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t SplitMix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = SplitMix64(sm);
}

Rng Rng::Split(std::uint64_t stream_id) const {
  // Mix the original seed with the stream id; splitmix64 in the
  // constructor decorrelates neighbouring ids.
  std::uint64_t sm = seed_ ^ (kGolden * (stream_id + 1));
  return Rng(SplitMix64(sm));
}

std::uint64_t Rng::NextUint64() {
  // xoshiro256++
  const std::uint64_t result = Rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double Rng::NextUniform() {
  // 53-bit mantissa shifted into (0, 1); never returns an endpoint.
  return (static_cast<double>(NextUint64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::NextUniform(double lo, double hi) {
  return lo + (hi - lo) * NextUniform();
}

double Rng::NextGaussian() {
  return InverseStandardNormalCdf(NextUniform());
}

std::uint64_t Rng::NextIndex(std::uint64_t n) {
  return NextUint64() % n;
}

}  // namespace securesgd
