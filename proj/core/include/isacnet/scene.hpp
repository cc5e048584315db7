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
#include <cstddef>
#include <vector>

#include "isacnet/numerics.hpp"
#include "isacnet/rng.hpp"

namespace isacnet {

/// Pathloss model PL_dB(d) = a + b * log10(d), d in meters.
struct Pathloss {
  double a_db = 30.0;
  double b_db = 36.0;

  double db(double distance_m) const { return a_db + b_db * std::log10(distance_m); }
  /// Linear power gain 10^(-PL/10).
  double gain(double distance_m) const { return db_to_linear(-db(distance_m)); }
};

enum class RcsModel {
  kUnitModulus,  ///< |beta| = 1, uniform phase
  kSwerling1,    ///< |beta|^2 ~ Exp(1), uniform phase
};

/// Closed interval [lo, hi]; lo == hi is a point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SceneConfig {
  int M = 16;
  int K = 4;
  int T = 8;
  Interval user_x_m{15.0, 18.0};
  Interval user_y_m{8.0, 18.0};
  Interval target_angle_deg{-80.0, -10.0};
  Interval target_range_m{5.0, 20.0};
  Pathloss comm_pathloss{30.0, 36.0};
  Pathloss radar_pathloss{30.0, 22.0};
  double sigma2_dbm = -94.0;  ///< downlink (UE) noise power
  double nu2_dbm = -70.0;     ///< base-station receiver noise power
  RcsModel rcs = RcsModel::kUnitModulus;

  double sigma2_watts() const { return dbm_to_watts(sigma2_dbm); }
  double nu2_watts() const { return dbm_to_watts(nu2_dbm); }

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct Target {
  double theta_rad = 0.0;
  double range_m = 0.0;
  cdouble alpha;  ///< path gain, |alpha|^2 = radar pathloss gain
  cdouble beta;   ///< radar cross section
  CVec g;         ///< g = conj(alpha) * conj(a(theta)), so g^H = alpha * a^T(theta)
};

struct Scene {
  CMat H;  ///< K x M, row k is h_k^H
  std::vector<Target> targets;
  std::vector<std::array<double, 2>> user_positions;

  int M() const { return static_cast<int>(H.cols()); }
  int K() const { return static_cast<int>(H.rows()); }
  int T() const { return static_cast<int>(targets.size()); }

  /// h_k as a column vector (conjugate transpose of row k of H).
  CVec user_channel(int k) const { return H.row(k).adjoint(); }
};

/// Half-wavelength ULA response, entry m = exp(-j pi m sin(theta)).
CVec steering_vector(double theta_rad, int M);

/// Target channel vector g with g^H = alpha * a^T(theta).
CVec target_channel(double theta_rad, cdouble alpha, int M);

cdouble rcs_draw(RngStream& rng, RcsModel model = RcsModel::kUnitModulus);

/// One world realization: uniform user positions with Rayleigh fading scaled by the
/// communication pathloss, and targets uniform in the configured sector/range window.
Scene sample_scene(const SceneConfig& cfg, RngStream& rng);

inline double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

}  // namespace isacnet
