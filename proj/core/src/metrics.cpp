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

#include "isacnet/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "isacnet/errors.hpp"

namespace isacnet {

Precoder::Precoder(CMat w, double pd_watts, int K) : w_(std::move(w)), pd_(pd_watts), k_(K) {
  if (K < 0 || w_.cols() != w_.rows() + K) {
    throw ShapeError("Precoder: W must be M x (M+K), got " + std::to_string(w_.rows()) + "x" +
                     std::to_string(w_.cols()) + " with K=" + std::to_string(K));
  }
  if (!(pd_watts > 0.0)) throw InvalidArgument("Precoder: P_d must be positive");
  require_finite(w_, "Precoder");
  const double p = w_.squaredNorm();
  if (std::abs(p - pd_watts) > 1e-9 * pd_watts) {
    throw InvalidArgument("Precoder: ||W||_F^2 = " + std::to_string(p) + " differs from P_d");
  }
}

Precoder Precoder::normalized(const CMat& w_hat, double pd_watts, int K) {
  const double n = frob_norm(w_hat);
  if (n == 0.0) throw DegenerateOutput("Precoder: cannot normalize an all-zero matrix");
  return Precoder((std::sqrt(pd_watts) / n) * w_hat, pd_watts, K);
}

DownlinkSymbols sample_symbols(int K, int M, RngStream& rng) {
  DownlinkSymbols s;
  s.d.resize(K);
  const double a = 1.0 / std::numbers::sqrt2;
  std::bernoulli_distribution bit(0.5);
  for (int k = 0; k < K; ++k) {
    s.d(k) = cdouble(bit(rng.engine()) ? a : -a, bit(rng.engine()) ? a : -a);
  }
  s.t.resize(M);
  for (int m = 0; m < M; ++m) s.t(m) = rng.cgauss(1.0);
  return s;
}

CVec downlink_tx(const CMat& W, int K, const DownlinkSymbols& sym) {
  if (sym.d.size() != K || sym.t.size() != W.cols() - K) {
    throw ShapeError("downlink_tx: symbol lengths do not match precoder");
  }
  return W.leftCols(K) * sym.d + W.rightCols(W.cols() - K) * sym.t;
}

CVec downlink_tx(const Precoder& W, const DownlinkSymbols& sym) {
  return downlink_tx(W.W(), W.K(), sym);
}

double sinr(const CMat& W, int K, const CVec& h, int k, double sigma2) {
  if (k < 0 || k >= K) throw InvalidArgument("sinr: user index out of range");
  if (!(sigma2 > 0.0)) throw InvalidArgument("sinr: sigma2 must be positive");
  if (h.size() != W.rows()) throw ShapeError("sinr: channel length != M");
  // h^H W as a row; column j gives h^H w_j.
  const Eigen::Matrix<cdouble, 1, Eigen::Dynamic> p = h.adjoint() * W;
  double signal = 0.0;
  double rest = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double v = std::norm(p(j));
    if (j == k) {
      signal = v;
    } else {
      rest += v;
    }
  }
  return signal / (rest + sigma2);
}

double sinr(const Precoder& W, const CVec& h, int k, double sigma2) {
  return sinr(W.W(), W.K(), h, k, sigma2);
}

std::vector<double> all_sinr(const CMat& W, int K, const Scene& scene, double sigma2) {
  if (scene.K() != K) throw ShapeError("all_sinr: scene K differs from precoder K");
  std::vector<double> out(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) out[static_cast<std::size_t>(k)] = sinr(W, K, scene.user_channel(k), k, sigma2);
  return out;
}

double illumination(const CMat& W, const CVec& g) {
  if (g.size() != W.rows()) throw ShapeError("illumination: g length != M");
  return (g.adjoint() * W).squaredNorm();
}

WorstIllumination worst_case_illumination(const CMat& W, const Scene& scene) {
  if (scene.targets.empty()) throw InvalidArgument("worst_case_illumination: no targets");
  WorstIllumination best{illumination(W, scene.targets[0].g), 0};
  for (int m = 1; m < scene.T(); ++m) {
    const double q = illumination(W, scene.targets[static_cast<std::size_t>(m)].g);
    if (q < best.value) best = {q, m};
  }
  return best;
}

std::vector<double> constraint_slack(const CMat& W, int K, const Scene& scene,
                                     double gamma_db, double sigma2) {
  const double threshold = db_to_linear(gamma_db);
  std::vector<double> h = all_sinr(W, K, scene, sigma2);
  for (double& v : h) v -= threshold;
  return h;
}

std::vector<double> mean_user_sinr(std::span<const std::vector<double>> sinr_per_realization) {
  if (sinr_per_realization.empty()) throw InvalidArgument("mean_user_sinr: empty evaluation set");
  const std::size_t K = sinr_per_realization.front().size();
  if (K == 0) throw InvalidArgument("mean_user_sinr: realizations carry no users");
  std::vector<double> mean(K, 0.0);
  for (const auto& r : sinr_per_realization) {
    if (r.size() != K) throw InvalidArgument("mean_user_sinr: K differs across realizations");
    for (std::size_t k = 0; k < K; ++k) mean[k] += r[k];
  }
  for (double& v : mean) v /= static_cast<double>(sinr_per_realization.size());
  return mean;
}

double worst_avg_sinr_db(std::span<const std::vector<double>> sinr_per_realization) {
  const std::vector<double> mean = mean_user_sinr(sinr_per_realization);
  double worst = mean.front();
  for (double v : mean) worst = std::min(worst, v);
  return linear_to_db(worst);
}

double worst_avg_sinr_db(std::span<const EvalSample> samples, double sigma2) {
  std::vector<std::vector<double>> per;
  per.reserve(samples.size());
  for (const EvalSample& s : samples) {
    per.push_back(all_sinr(s.precoder->W(), s.precoder->K(), *s.scene, sigma2));
  }
  return worst_avg_sinr_db(per);
}

}  // namespace isacnet
