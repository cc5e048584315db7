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

#include <span>
#include <vector>

#include "isacnet/numerics.hpp"
#include "isacnet/rng.hpp"
#include "isacnet/scene.hpp"

namespace isacnet {

/// Transmit precoder W = [C, S], M x (M+K), with ||W||_F^2 = P_d.
class Precoder {
 public:
  /// Validates the power invariant to 1e-9 relative.
  Precoder(CMat w, double pd_watts, int K);
  /// Scales `w_hat` onto the power sphere. Throws DegenerateOutput if w_hat = 0.
  static Precoder normalized(const CMat& w_hat, double pd_watts, int K);

  const CMat& W() const { return w_; }
  double pd() const { return pd_; }
  int K() const { return k_; }
  int M() const { return static_cast<int>(w_.rows()); }

  auto C() const { return w_.leftCols(k_); }
  auto S() const { return w_.rightCols(w_.cols() - k_); }

 private:
  CMat w_;
  double pd_;
  int k_;
};

struct DownlinkSymbols {
  CVec d;  ///< K communication symbols
  CVec t;  ///< M sensing waveform samples
};

/// QPSK data symbols and CN(0,1) sensing samples, both unit variance.
DownlinkSymbols sample_symbols(int K, int M, RngStream& rng);

/// x = C d + S t. Accepts any M x (M+K) matrix (the power invariant is not needed).
CVec downlink_tx(const CMat& W, int K, const DownlinkSymbols& sym);
CVec downlink_tx(const Precoder& W, const DownlinkSymbols& sym);

/// SINR of user k. `h` is h_k (column), `W` any M x (M+K) matrix whose first K columns are C.
double sinr(const CMat& W, int K, const CVec& h, int k, double sigma2);
double sinr(const Precoder& W, const CVec& h, int k, double sigma2);

/// All K SINRs using the true channels of `scene`.
std::vector<double> all_sinr(const CMat& W, int K, const Scene& scene, double sigma2);

/// Q_m = g^H W W^H g.
double illumination(const CMat& W, const CVec& g);

struct WorstIllumination {
  double value = 0.0;
  int index = 0;
};

/// min_m Q_m, lowest index on ties. Throws InvalidArgument when the scene has no targets.
WorstIllumination worst_case_illumination(const CMat& W, const Scene& scene);

/// h_k = gamma_k - 10^(gamma_db/10), linear SINR units.
std::vector<double> constraint_slack(const CMat& W, int K, const Scene& scene,
                                     double gamma_db, double sigma2);

/// min_k E[gamma_k] in dB. Input is one vector of linear per-user SINRs per realization;
/// every realization must have the same K. Throws InvalidArgument on an empty set.
double worst_avg_sinr_db(std::span<const std::vector<double>> sinr_per_realization);

/// Per-user mean linear SINR across realizations.
std::vector<double> mean_user_sinr(std::span<const std::vector<double>> sinr_per_realization);

struct EvalSample {
  const Precoder* precoder;
  const Scene* scene;
};
double worst_avg_sinr_db(std::span<const EvalSample> samples, double sigma2);

}  // namespace isacnet
