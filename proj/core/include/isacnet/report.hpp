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
#include <optional>
#include <string>
#include <vector>

#include "isacnet/training.hpp"

namespace isacnet {

/// One method at one sweep point.
struct ResultRow {
  std::string method;  ///< proposed | perfect-csi | estimated-csi
  std::string axis;    ///< sweep axis name, "none" for a plain evaluation
  double sweep_value = 0.0;
  double gamma_min_db = 0.0;
  double q_db = 0.0;  ///< 10 log10 of the mean (over realizations) worst-case illumination
  std::vector<double> user_sinr_db;  ///< per-user mean SINR
  double feasible_fraction = 0.0;    ///< realizations with every gamma_k >= Gamma
  double ms_per_inference = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kResultsHeader = "# isacnet-results v1";
inline constexpr const char* kHistoryHeader = "# isacnet-history v1";
inline constexpr const char* kScalingHeader = "# isacnet-scaling v1";

/// Metric columns are printed with 17 significant digits so equal values give equal text.
std::string results_csv(const std::vector<ResultRow>& rows);
std::string history_csv(const std::vector<BatchRecord>& history);

struct ScalingPoint {
  int K = 0;
  double median_ms = 0.0;
  double flops = 0.0;  ///< multiply-adds x 2 of one forward pass
  int repeats = 0;
};

struct ScalingFit {
  /// Power law t = a K^b fitted in log-log space; nullopt with fewer than two distinct K.
  std::optional<double> exponent;
  std::optional<double> r2_loglog;
  /// Ordinary t = c0 + c1 K fit.
  std::optional<double> slope_ms_per_user;
  std::optional<double> intercept_ms;
  std::optional<double> r2_linear;
};

ScalingFit fit_scaling(const std::vector<ScalingPoint>& pts);
std::string scaling_csv(const std::vector<ScalingPoint>& pts, const ScalingFit& fit);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  /// Dashed horizontal reference line, e.g. the SINR target.
  std::optional<double> reference;
  std::string reference_label = "Target";
};

/// Static SVG line plot. The output depends only on `plot` (no timestamps, fixed
/// number formatting), so identical inputs give identical bytes.
std::string svg_line_plot(const PlotSpec& plot);

}  // namespace isacnet
