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

#ifndef SECURESGD_NORMAL_H_
#define SECURESGD_NORMAL_H_

namespace securesgd {

// Standard normal CDF, accurate in both tails (erfc based).
double StandardNormalCdf(double x);

// Inverse of the standard normal CDF for p in (0, 1), Wichura's AS241
// (PPND16) rational approximation, accurate to ~1e-16 relative.
double InverseStandardNormalCdf(double p);

}  // namespace securesgd

#endif  // SECURESGD_NORMAL_H_
