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

#include "isacnet/numerics.hpp"
#include "isacnet/rng.hpp"
#include "isacnet/scene.hpp"

namespace isacnet {

struct SoundingConfig {
  int L_p = 20;          ///< uplink pilot length
  int L_r = 32;          ///< probing snapshots
  double pu_dbw = 0.0;   ///< per-user uplink power
  double pr_dbw = 10.0;  ///< total probing power
  bool noise = true;     ///< false gives the noiseless limit (nu^2 is then ignored)

  double pu_watts() const { return db_to_linear(pu_dbw); }
  double pr_watts() const { return db_to_linear(pr_dbw); }

  void validate(int M, int K) const;
};

/// The only inputs the network sees.
struct SoundingData {
  CMat Y;  ///< M x K compressed pilots
  CMat Z;  ///< M x M matched-filtered echoes
};

/// First K rows of an L_p-point DFT matrix: F F^H = L_p I_K.
CMat gen_pilots(int K, int L_p);

/// First M rows of an L_r-point DFT matrix scaled by 1/sqrt(M): E E^H = (L_r/M) I_M.
CMat gen_probing(int M, int L_r);

/// Y = sqrt(P_u) H^T F + N, N ~ CN(0, nu2). The rng is untouched when add_noise is false.
CMat rx_pilots(const Scene& scene, const CMat& F, double pu_watts, double nu2_watts,
               RngStream& rng, bool add_noise = true);

/// Y F^H; equals sqrt(P_u) L_p H^T without noise.
CMat pilot_compress(const CMat& Y, const CMat& F);

/// Z = sqrt(P_r) sum_m beta_m g_m^* g_m^H E + V, V ~ CN(0, nu2).
CMat rx_echoes(const Scene& scene, const CMat& E, double pr_watts, double nu2_watts,
               RngStream& rng, bool add_noise = true);

/// Z E^H.
CMat matched_filter(const CMat& Z, const CMat& E);

/// Full acquisition: pilots, echoes, compression and matched filtering.
/// Pilot noise is drawn before echo noise from the same stream.
SoundingData acquire(const Scene& scene, const SoundingConfig& cfg, double nu2_watts,
                     RngStream& rng);

}  // namespace isacnet
