// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The isacnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isacnet/training.hpp"

namespace isacnet {

/// Provenance stored in the sidecar.
struct DatasetMeta {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string note;
};

/// Writes `<base>.bin` (raw little-endian float64) and `<base>.json` (shapes, count,
/// seeds, per-sample layout). Every sample must share M, K and T. Per sample, in order:
/// Y, Z, H as (re, im) pairs in row-major order, user positions (x, y), then per target
/// theta, range, alpha (re, im), beta (re, im). Target channels are rebuilt on load.
void save_dataset(const std::string& base, const std::vector<TrainingSample>& samples,
                  const DatasetMeta& meta);

struct Dataset {
  std::vector<TrainingSample> samples;
  DatasetMeta meta;
};

/// Throws ConfigError when the sidecar and the blob disagree.
Dataset load_dataset(const std::string& base);

}  // namespace isacnet
