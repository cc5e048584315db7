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

#include "isacnet/scene.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "isacnet/errors.hpp"

namespace isacnet {

namespace {

void check_interval(const Interval& iv, const char* name) {
  if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi)) {
    throw InvalidArgument(std::string("SceneConfig: ") + name + " must satisfy lo <= hi");
  }
}

}  // namespace

void SceneConfig::validate() const {
  if (M < 1 || K < 1 || T < 1) throw InvalidArgument("SceneConfig: M, K, T must be >= 1");
  check_interval(user_x_m, "user_x_range_m");
  check_interval(user_y_m, "user_y_range_m");
  check_interval(target_angle_deg, "target_angle_range_deg");
  check_interval(target_range_m, "target_range_range_m");
  if (target_range_m.lo <= 0.0) throw InvalidArgument("SceneConfig: target ranges must be > 0");
  if (target_angle_deg.lo < -90.0 || target_angle_deg.hi > 90.0) {
    throw InvalidArgument("SceneConfig: target angles must lie in [-90, 90] degrees");
  }
  if (!(comm_pathloss.a_db > 0.0 && comm_pathloss.b_db > 0.0 && radar_pathloss.a_db > 0.0 &&
        radar_pathloss.b_db > 0.0)) {
    throw InvalidArgument("SceneConfig: pathloss coefficients must be positive");
  }
  if (!std::isfinite(sigma2_dbm) || !std::isfinite(nu2_dbm)) {
    throw InvalidArgument("SceneConfig: noise powers must be finite");
  }
}

CVec steering_vector(double theta_rad, int M) {
  if (M < 1) throw InvalidArgument("steering_vector: M must be >= 1");
  CVec a(M);
  const double s = std::sin(theta_rad);
  for (int m = 0; m < M; ++m) a(m) = std::polar(1.0, -std::numbers::pi * m * s);
  return a;
}

CVec target_channel(double theta_rad, cdouble alpha, int M) {
  return std::conj(alpha) * steering_vector(theta_rad, M).conjugate();
}

cdouble rcs_draw(RngStream& rng, RcsModel model) {
  const double ph = rng.phase();
  switch (model) {
    case RcsModel::kSwerling1: {
      // |beta|^2 ~ Exp(1) is the squared modulus of a CN(0,1) draw.
      const cdouble z = rng.cgauss(1.0);
      return std::polar(std::abs(z), ph);
    }
    case RcsModel::kUnitModulus:
    default:
      return std::polar(1.0, ph);
  }
}

Scene sample_scene(const SceneConfig& cfg, RngStream& rng) {
  cfg.validate();
  Scene s;
  s.H.resize(cfg.K, cfg.M);
  s.user_positions.resize(static_cast<std::size_t>(cfg.K));
  for (int k = 0; k < cfg.K; ++k) {
    const double x = rng.uniform(cfg.user_x_m.lo, cfg.user_x_m.hi);
    const double y = rng.uniform(cfg.user_y_m.lo, cfg.user_y_m.hi);
    s.user_positions[static_cast<std::size_t>(k)] = {x, y};
    const double amp = std::sqrt(cfg.comm_pathloss.gain(std::hypot(x, y)));
    for (int m = 0; m < cfg.M; ++m) s.H(k, m) = amp * rng.cgauss(1.0);
  }
  s.targets.reserve(static_cast<std::size_t>(cfg.T));
  for (int t = 0; t < cfg.T; ++t) {
    Target tg;
    tg.theta_rad = deg_to_rad(rng.uniform(cfg.target_angle_deg.lo, cfg.target_angle_deg.hi));
    tg.range_m = rng.uniform(cfg.target_range_m.lo, cfg.target_range_m.hi);
    tg.alpha = std::polar(std::sqrt(cfg.radar_pathloss.gain(tg.range_m)), rng.phase());
    tg.beta = rcs_draw(rng, cfg.rcs);
    tg.g = target_channel(tg.theta_rad, tg.alpha, cfg.M);
    s.targets.push_back(std::move(tg));
  }
  return s;
}

}  // namespace isacnet
