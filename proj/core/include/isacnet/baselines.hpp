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
#include <span>
#include <vector>

#include "isacnet/metrics.hpp"
#include "isacnet/scene.hpp"
#include "isacnet/sounding.hpp"

namespace isacnet {

/// H^ = (Y~ / (sqrt(P_u) L_p))^T, K x M.
CMat ls_channel_estimate(const CMat& Y_tilde, double pu_watts, int L_p);

struct AngleGrid {
  std::vector<double> theta_rad;  ///< ascending

  /// lo..hi inclusive in `step_deg` increments. Default: 0.25 deg over [-90, 90].
  static AngleGrid uniform(double lo_deg = -90.0, double hi_deg = 90.0, double step_deg = 0.25);
};

/// |a^H(theta) Z~ a^*(theta)| on every grid angle.
std::vector<double> bartlett_spectrum(const CMat& Z_tilde, const AngleGrid& grid);

struct DoaResult {
  std::vector<double> angles_rad;  ///< T angles, ascending
  bool low_confidence = false;     ///< fewer than T peaks; padded with largest remaining values
};

/// The T largest local maxima of the Bartlett spectrum. A peak is strictly greater than
/// both neighbors; an endpoint only needs to beat its single neighbor.
DoaResult bartlett_doa(const CMat& Z_tilde, int T, const AngleGrid& grid);

/// Least-squares fit Z~ ~ sqrt(P_r) (L_r/M) sum_m c_m a(theta_m) a^T(theta_m), returning
/// c_m = beta_m alpha_m^2. Throws IllConditioned when the atoms are (nearly) dependent,
/// e.g. for repeated angles.
CVec coeff_ls(const CMat& Z_tilde, std::span<const double> angles_rad, double pr_watts, int L_r,
              int M);

struct ChannelEstimate {
  CMat H;                      ///< K x M
  std::vector<double> angles;  ///< estimated theta_m
  CVec coeffs;                 ///< c_m
  std::vector<CVec> g;         ///< reconstructed target channels
  bool low_confidence = false;
};

/// Least-squares users, Bartlett angles, least-squares coefficients. Target channels are
/// rebuilt as g_m = conj(alpha_m) conj(a(theta_m)) with |alpha_m|^2 = |c_m| (unit RCS).
/// When the estimated angles are too close for the joint fit, each c_m is taken from its
/// own matched-filter projection instead and the estimate is marked low_confidence.
ChannelEstimate estimate_channels(const SoundingData& data, const SoundingConfig& sounding, int K,
                                  int T, const AngleGrid& grid = AngleGrid::uniform());

struct OptimizerOptions {
  int restarts = 4;
  int iterations = 1200;
  double lr_start = 2e-2;
  double lr_end = 2e-4;
  int kappa = 1;
  /// Internal SINR target is gamma * (1 + margin) so that the final point lands feasible.
  double margin = 0.02;
  double dual_step = 50.0;
  double mu_init = 1.0;
  double feasibility_tol = 1e-6;
  std::uint64_t seed = 7;
};

struct OptimizeResult {
  Precoder precoder;
  bool feasible = false;
  std::vector<double> slack;  ///< gamma_k - Gamma (linear) under the channels supplied
  double q = 0.0;             ///< worst-case illumination under the channels supplied
  int restarts = 0;
};

/// Maximizes the modified-Lagrangian objective of the precoding problem directly over W
/// on the power sphere with projected Adam, dual ascent on the multipliers, and
/// multi-start. Returns the best feasible iterate across all restarts, or the least
/// violating one (feasible = false). `H` may have zero rows (no users).
OptimizeResult optimize_precoder(const CMat& H, std::span<const CVec> g, double gamma_db,
                                 double pd_watts, double sigma2_watts,
                                 const OptimizerOptions& opts = {});

}  // namespace isacnet
