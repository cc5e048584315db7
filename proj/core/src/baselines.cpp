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

#include "isacnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "isacnet/autodiff.hpp"
#include "isacnet/errors.hpp"

namespace isacnet {

CMat ls_channel_estimate(const CMat& Y_tilde, double pu_watts, int L_p) {
  if (!(pu_watts > 0.0)) throw InvalidArgument("ls_channel_estimate: P_u must be positive");
  if (L_p < Y_tilde.cols()) throw InvalidArgument("ls_channel_estimate: L_p must be >= K");
  return (Y_tilde / (std::sqrt(pu_watts) * L_p)).transpose();
}

AngleGrid AngleGrid::uniform(double lo_deg, double hi_deg, double step_deg) {
  if (!(step_deg > 0.0) || hi_deg < lo_deg) throw InvalidArgument("AngleGrid: bad range");
  AngleGrid g;
  const auto n = static_cast<long>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
  g.theta_rad.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g.theta_rad.push_back(deg_to_rad(lo_deg + step_deg * i));
  return g;
}

std::vector<double> bartlett_spectrum(const CMat& Z_tilde, const AngleGrid& grid) {
  const int M = static_cast<int>(Z_tilde.rows());
  if (Z_tilde.cols() != M) throw ShapeError("bartlett_spectrum: Z~ must be square");
  std::vector<double> out;
  out.reserve(grid.theta_rad.size());
  for (double th : grid.theta_rad) {
    const CVec a = steering_vector(th, M);
    out.push_back(std::abs((a.adjoint() * Z_tilde * a.conjugate())(0, 0)));
  }
  return out;
}

DoaResult bartlett_doa(const CMat& Z_tilde, int T, const AngleGrid& grid) {
  if (T < 1) throw InvalidArgument("bartlett_doa: T must be >= 1");
  const std::size_t n = grid.theta_rad.size();
  if (n < static_cast<std::size_t>(T)) throw InvalidArgument("bartlett_doa: grid smaller than T");
  const std::vector<double> p = bartlett_spectrum(Z_tilde, grid);

  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || p[i] > p[i - 1];
    const bool right = i + 1 == n || p[i] > p[i + 1];
    if (n > 1 && left && right) peaks.push_back(i);
  }
  auto by_power = [&](std::size_t a, std::size_t b) {
    return p[a] > p[b] || (p[a] == p[b] && a < b);
  };
  std::stable_sort(peaks.begin(), peaks.end(), by_power);

  DoaResult r;
  std::vector<std::size_t> chosen(peaks.begin(),
                                  peaks.begin() + std::min<std::size_t>(peaks.size(), T));
  if (chosen.size() < static_cast<std::size_t>(T)) {
    r.low_confidence = true;
    std::vector<std::size_t> rest(n);
    std::iota(rest.begin(), rest.end(), 0);
    std::stable_sort(rest.begin(), rest.end(), by_power);
    for (std::size_t idx : rest) {
      if (chosen.size() == static_cast<std::size_t>(T)) break;
      if (std::find(chosen.begin(), chosen.end(), idx) == chosen.end()) chosen.push_back(idx);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t idx : chosen) r.angles_rad.push_back(grid.theta_rad[idx]);
  return r;
}

CVec coeff_ls(const CMat& Z_tilde, std::span<const double> angles_rad, double pr_watts, int L_r,
              int M) {
  if (Z_tilde.rows() != M || Z_tilde.cols() != M) throw ShapeError("coeff_ls: Z~ must be M x M");
  const auto T = static_cast<Eigen::Index>(angles_rad.size());
  if (T == 0) return CVec(0);
  const double s = std::sqrt(pr_watts) * static_cast<double>(L_r) / M;
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(M) * M, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const CVec a = steering_vector(angles_rad[static_cast<std::size_t>(t)], M);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) A(static_cast<Eigen::Index>(i) * M + j, t) = s * a(i) * a(j);
    }
  }
  Eigen::VectorXcd z(static_cast<Eigen::Index>(M) * M);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) z(static_cast<Eigen::Index>(i) * M + j) = Z_tilde(i, j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(T - 1) / sv(0) < 1e-8) {
    throw IllConditioned("coeff_ls: steering atoms are linearly dependent (repeated angles?)");
  }
  return svd.solve(z);
}

ChannelEstimate estimate_channels(const SoundingData& data, const SoundingConfig& sounding, int K,
                                  int T, const AngleGrid& grid) {
  const int M = static_cast<int>(data.Z.rows());
  if (data.Y.cols() != K) throw ShapeError("estimate_channels: Y~ must have K columns");
  ChannelEstimate est;
  est.H = ls_channel_estimate(data.Y, sounding.pu_watts(), sounding.L_p);
  const DoaResult doa = bartlett_doa(data.Z, T, grid);
  est.angles = doa.angles_rad;
  est.low_confidence = doa.low_confidence;
  try {
    est.coeffs = coeff_ls(data.Z, est.angles, sounding.pr_watts(), sounding.L_r, M);
  } catch (const IllConditioned&) {
    // Per-atom projection, exact for a single isolated target.
    const double s = std::sqrt(sounding.pr_watts()) * sounding.L_r / M;
    est.coeffs.resize(static_cast<Eigen::Index>(est.angles.size()));
    for (std::size_t m = 0; m < est.angles.size(); ++m) {
      const CVec a = steering_vector(est.angles[m], M);
      const cdouble proj = (a.adjoint() * data.Z * a.conjugate())(0, 0);
      est.coeffs(static_cast<Eigen::Index>(m)) = proj / (s * M * M);
    }
    est.low_confidence = true;
  }
  for (Eigen::Index m = 0; m < est.coeffs.size(); ++m) {
    const double gain = std::sqrt(std::abs(est.coeffs(m)));
    est.g.push_back(target_channel(est.angles[static_cast<std::size_t>(m)], cdouble(gain, 0.0), M));
  }
  return est;
}

namespace {

struct Problem {
  RMat target_lift;  // 2T x 2M
  RMat user_lift;    // 2K x 2M
  int M = 0;
  int K = 0;
  double pd = 1.0;
  double sigma2 = 1.0;
  double gamma = 1.0;
  double q_ref = 1.0;
};

struct Iterate {
  double q = 0.0;
  std::vector<double> slack;  // true slack, linear
  double worst_violation = 0.0;
};

Iterate assess(const CMat& W, const Problem& pb, const CMat& H, std::span<const CVec> g) {
  Iterate it;
  it.q = std::numeric_limits<double>::infinity();
  for (const CVec& gm : g) it.q = std::min(it.q, illumination(W, gm));
  for (int k = 0; k < pb.K; ++k) {
    const double s = sinr(W, pb.K, CVec(H.row(k).adjoint()), k, pb.sigma2) - pb.gamma;
    it.slack.push_back(s);
    it.worst_violation = std::max(it.worst_violation, -s / pb.gamma);
  }
  return it;
}

RMat informed_start(const CMat& H, std::span<const CVec> g, int M) {
  const int K = static_cast<int>(H.rows());
  CMat W = CMat::Zero(M, M + K);
  for (int k = 0; k < K; ++k) W.col(k) = H.row(k).adjoint() / std::max(H.row(k).norm(), 1e-300);
  for (std::size_t m = 0; m < g.size(); ++m) {
    W.col(K + static_cast<int>(m % static_cast<std::size_t>(M))) +=
        g[m] / std::max(g[m].norm(), 1e-300);
  }
  RMat x = c2r_stack(W);
  return x / x.norm();
}

}  // namespace

OptimizeResult optimize_precoder(const CMat& H, std::span<const CVec> g, double gamma_db,
                                 double pd_watts, double sigma2_watts,
                                 const OptimizerOptions& opts) {
  if (g.empty()) throw InvalidArgument("optimize_precoder: need at least one target");
  if (!(pd_watts > 0.0) || !(sigma2_watts > 0.0)) {
    throw InvalidArgument("optimize_precoder: P_d and sigma2 must be positive");
  }
  if (opts.restarts < 1 || opts.iterations < 1) {
    throw InvalidArgument("optimize_precoder: restarts and iterations must be >= 1");
  }
  const int M = static_cast<int>(g.front().size());
  const int K = static_cast<int>(H.rows());
  if (K > 0 && H.cols() != M) throw ShapeError("optimize_precoder: H must be K x M");

  Problem pb;
  pb.M = M;
  pb.K = K;
  pb.pd = pd_watts;
  pb.sigma2 = sigma2_watts;
  pb.gamma = db_to_linear(gamma_db);
  CMat gh(static_cast<Eigen::Index>(g.size()), M);
  double gmax = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (g[m].size() != M) throw ShapeError("optimize_precoder: target channel length != M");
    gh.row(static_cast<Eigen::Index>(m)) = g[m].adjoint();
    gmax = std::max(gmax, g[m].squaredNorm());
  }
  pb.target_lift = lift_rows(gh);
  if (K > 0) pb.user_lift = lift_rows(H);
  pb.q_ref = pd_watts * std::max(gmax, 1e-300);
  const double target = pb.gamma * (1.0 + opts.margin);

  RngStream rng(opts.seed, 0x0b7e5);
  const Eigen::Index rows = 2 * M;
  const Eigen::Index cols = M + K;

  bool have_best = false;
  bool best_feasible = false;
  double best_q = -1.0;
  double best_violation = std::numeric_limits<double>::infinity();
  CMat best_W;

  auto consider = [&](const CMat& W) {
    const Iterate it = assess(W, pb, H, g);
    const bool feas = it.worst_violation * pb.gamma <= opts.feasibility_tol;
    bool take = false;
    if (!have_best) {
      take = true;
    } else if (feas && !best_feasible) {
      take = true;
    } else if (feas && best_feasible) {
      take = it.q > best_q;
    } else if (!feas && !best_feasible) {
      take = it.worst_violation < best_violation ||
             (it.worst_violation == best_violation && it.q > best_q);
    }
    if (take) {
      have_best = true;
      best_feasible = feas;
      best_q = it.q;
      best_violation = it.worst_violation;
      best_W = W;
    }
  };

  for (int r = 0; r < opts.restarts; ++r) {
    RMat x;
    if (r == 0) {
      x = informed_start(H, g, M);
    } else {
      x.resize(rows, cols);
      for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
      x /= x.norm();
    }
    RMat mu = RMat::Constant(std::max(K, 1), 1, opts.mu_init);
    RMat m1 = RMat::Zero(rows, cols);
    RMat m2 = RMat::Zero(rows, cols);
    const double b1 = 0.9, b2 = 0.999;

    for (int it = 0; it < opts.iterations; ++it) {
      const double frac = opts.iterations > 1 ? static_cast<double>(it) / (opts.iterations - 1) : 1.0;
      const double lr = opts.lr_end + 0.5 * (opts.lr_start - opts.lr_end) * (1.0 + std::cos(std::numbers::pi * frac));

      ad::Tape tape;
      const ad::Var xv = tape.parameter(x);
      const ad::Var w = tape.frob_normalize(xv, pd_watts);
      const ad::Var q = tape.min_entry(
          tape.row_sum(tape.pair_power(tape.matmul(tape.constant(pb.target_lift), w))));
      ad::Var objective = tape.scale(q, 1.0 / pb.q_ref);
      RMat rel_slack;
      if (K > 0) {
        const ad::Var power = tape.pair_power(tape.matmul(tape.constant(pb.user_lift), w));
        const ad::Var signal = tape.diag(power);
        const ad::Var interference = tape.sub(tape.row_sum(power), signal);
        const ad::Var sinr_v = tape.div(signal, tape.add_const(interference, sigma2_watts));
        const ad::Var slack = tape.scale(tape.add_const(sinr_v, -target), 1.0 / target);
        const ad::Var weight = tape.abs(tape.constant(mu));
        const ad::Var pen = tape.sum(tape.mul(tape.mul(weight, tape.max_zero(tape.neg(slack))),
                                              tape.pow_int(slack, opts.kappa)));
        objective = tape.add(objective, pen);
        rel_slack = tape.value(slack);
      }
      const ad::Var loss = tape.neg(objective);
      tape.backward(loss);
      const RMat grad = tape.grad(xv);

      m1 = b1 * m1 + (1.0 - b1) * grad;
      m2 = b2 * m2 + (1.0 - b2) * grad.cwiseAbs2();
      const double c1 = 1.0 - std::pow(b1, it + 1);
      const double c2 = 1.0 - std::pow(b2, it + 1);
      x.array() -= lr * (m1.array() / c1) / ((m2.array() / c2).sqrt() + 1e-12);
      x /= x.norm();

      for (int k = 0; k < K; ++k) {
        mu(k, 0) += opts.dual_step * lr * std::max(-rel_slack(k, 0), 0.0);
      }
      if (it >= opts.iterations / 2 || it + 1 == opts.iterations) {
        consider(r2c_merge((std::sqrt(pd_watts) / x.norm()) * x));
      }
    }
  }

  OptimizeResult res{Precoder::normalized(best_W, pd_watts, K), best_feasible, {}, 0.0,
                     opts.restarts};
  const Iterate fin = assess(res.precoder.W(), pb, H, g);
  res.slack = fin.slack;
  res.q = fin.q;
  return res;
}

}  // namespace isacnet
