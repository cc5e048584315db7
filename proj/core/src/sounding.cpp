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

#include "isacnet/sounding.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "isacnet/errors.hpp"

namespace isacnet {

namespace {

CMat dft_rows(int rows, int n) {
  CMat out(rows, n);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) {
      // Reduce the index product mod n so the phase stays exact for large products.
      const long long idx = (static_cast<long long>(r) * c) % n;
      out(r, c) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(idx) / n);
    }
  }
  return out;
}

}  // namespace

void SoundingConfig::validate(int M, int K) const {
  if (L_p < K) throw InvalidArgument("SoundingConfig: L_p must be >= K");
  if (L_r < M) throw InvalidArgument("SoundingConfig: L_r must be >= M");
  if (!std::isfinite(pu_dbw) || !std::isfinite(pr_dbw)) {
    throw InvalidArgument("SoundingConfig: powers must be finite");
  }
}

CMat gen_pilots(int K, int L_p) {
  if (K < 1 || L_p < K) {
    throw InvalidArgument("gen_pilots: need 1 <= K <= L_p, got K=" + std::to_string(K) +
                          " L_p=" + std::to_string(L_p));
  }
  return dft_rows(K, L_p);
}

CMat gen_probing(int M, int L_r) {
  if (M < 1 || L_r < M) {
    throw InvalidArgument("gen_probing: need 1 <= M <= L_r, got M=" + std::to_string(M) +
                          " L_r=" + std::to_string(L_r));
  }
  return dft_rows(M, L_r) / std::sqrt(static_cast<double>(M));
}

CMat rx_pilots(const Scene& scene, const CMat& F, double pu_watts, double nu2_watts,
               RngStream& rng, bool add_noise) {
  if (F.rows() != scene.K()) throw ShapeError("rx_pilots: F must have K rows");
  CMat Y = std::sqrt(pu_watts) * (scene.H.transpose() * F);
  if (add_noise) Y += sample_cgauss(rng, Y.rows(), Y.cols(), nu2_watts);
  return Y;
}

CMat pilot_compress(const CMat& Y, const CMat& F) {
  if (Y.cols() != F.cols()) throw ShapeError("pilot_compress: Y and F pilot lengths differ");
  return Y * F.adjoint();
}

CMat rx_echoes(const Scene& scene, const CMat& E, double pr_watts, double nu2_watts,
               RngStream& rng, bool add_noise) {
  const int M = scene.M();
  if (E.rows() != M) throw ShapeError("rx_echoes: E must have M rows");
  CMat R = CMat::Zero(M, M);
  for (const Target& t : scene.targets) {
    R += t.beta * (t.g.conjugate() * t.g.adjoint());
  }
  CMat Z = std::sqrt(pr_watts) * (R * E);
  if (add_noise) Z += sample_cgauss(rng, Z.rows(), Z.cols(), nu2_watts);
  return Z;
}

CMat matched_filter(const CMat& Z, const CMat& E) {
  if (Z.cols() != E.cols()) throw ShapeError("matched_filter: Z and E lengths differ");
  return Z * E.adjoint();
}

SoundingData acquire(const Scene& scene, const SoundingConfig& cfg, double nu2_watts,
                     RngStream& rng) {
  cfg.validate(scene.M(), scene.K());
  const CMat F = gen_pilots(scene.K(), cfg.L_p);
  const CMat E = gen_probing(scene.M(), cfg.L_r);
  SoundingData out;
  out.Y = pilot_compress(rx_pilots(scene, F, cfg.pu_watts(), nu2_watts, rng, cfg.noise), F);
  out.Z = matched_filter(rx_echoes(scene, E, cfg.pr_watts(), nu2_watts, rng, cfg.noise), E);
  return out;
}

}  // namespace isacnet
