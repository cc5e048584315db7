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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "isacnet/baselines.hpp"
#include "isacnet/scene.hpp"
#include "isacnet/sounding.hpp"
#include "isacnet/training.hpp"

namespace isacnet {

enum class SweepAxis { kNone, kPdDbw, kGammaDb, kKTest, kArea };

const char* sweep_axis_name(SweepAxis a);

/// User rectangle for the area sweep: x in [x_lo, x_hi], y in [y_lo, y_hi] metres.
struct AreaRect {
  Interval x;
  Interval y;

  double area() const { return (x.hi - x.lo) * (y.hi - y.lo); }
};

struct SweepConfig {
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> values;  ///< pd_dbw, gamma_db or k_test values
  std::vector<AreaRect> areas;

  /// Number of sweep points (1 when axis is none).
  std::size_t size() const;
};

struct EvalConfig {
  int realizations = 100;
  std::uint64_t seed = 1000;
  double pd_dbw = 0.0;
  bool proposed = true;
  bool perfect_csi = true;
  bool estimated_csi = true;
};

struct ScalingConfig {
  std::vector<int> k_values{2, 4, 8, 16};
  int repeats = 50;
};

struct ExperimentConfig {
  SceneConfig scene;
  SoundingConfig sounding;
  Hyperparams train;
  OptimizerOptions baseline;
  EvalConfig eval;
  SweepConfig sweep;
  ScalingConfig scaling;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a JSON document. Every field is optional (missing fields keep the defaults
/// above); unknown keys, wrong types and invalid values throw ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON form, every field present. parse_config(to_json(c)) == c.
std::string to_json(const ExperimentConfig& c);

/// The "train" section alone, as embedded in checkpoint headers.
std::string to_json(const Hyperparams& h);
Hyperparams parse_hyperparams(const std::string& json_text);

}  // namespace isacnet
