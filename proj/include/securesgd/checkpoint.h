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

#ifndef SECURESGD_CHECKPOINT_H_
#define SECURESGD_CHECKPOINT_H_

#include <string>

#include "securesgd/secure_sgd.h"

namespace securesgd {

// Versioned structured-text checkpoint.  Doubles are written as C hex
// floats, so a save/load round trip is bit exact.  The format is documented
// field by field in the README.
void SaveCheckpoint(const TrainedModel& model, const std::string& path);
TrainedModel LoadCheckpoint(const std::string& path);

}  // namespace securesgd

#endif  // SECURESGD_CHECKPOINT_H_
