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

#include "isacnet/errors.hpp"
#include "isacnet/training.hpp"

#include <cmath>

namespace isacnet {

void Hyperparams::validate() const {
  if (d < 1) throw InvalidArgument("Hyperparams: d must be positive");
  if (kappa < 1 || kappa % 2 == 0) throw InvalidArgument("Hyperparams: kappa must be odd and >= 1");
  if (!(eps > 0.0)) throw InvalidArgument("Hyperparams: eps must be positive");
  if (!(lambda_s > 0.0) || !(lambda_c > 0.0)) {
    throw InvalidArgument("Hyperparams: lambda_s and lambda_c must be positive");
  }
  if (!(learning_rate > 0.0)) throw InvalidArgument("Hyperparams: learning rate must be positive");
  if (epochs < 0 || batches_per_epoch < 1 || batch_size < 1) {
    throw InvalidArgument("Hyperparams: epochs >= 0, batches and batch size >= 1");
  }
  if (!(norm_eps >= 0.0)) throw InvalidArgument("Hyperparams: norm_eps must be >= 0");
  if (calibration_samples < 1) throw InvalidArgument("Hyperparams: calibration_samples >= 1");
}

MuUpdate mu_update_mode(const Hyperparams& hp) { return hp.mu_update; }

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

LossTerms loss_of_precoder(const CMat& W, const RMat& mu, const Scene& scene,
                           const Hyperparams& hp, double sigma2_watts) {
  const int K = scene.K();
  if (mu.rows() != K) throw ShapeError("loss: mu length differs from K");
  LossTerms t;
  t.q = worst_case_illumination(W, scene).value;
  t.q_term = hp.lambda_s * t.q;
  const std::vector<double> h = constraint_slack(W, K, scene, hp.gamma_db, sigma2_watts);
  double pen = 0.0;
  t.min_slack = h.empty() ? 0.0 : h.front();
  for (int k = 0; k < K; ++k) {
    const double hk = h[static_cast<std::size_t>(k)];
    t.min_slack = std::min(t.min_slack, hk);
    pen += std::abs(mu(k, 0) + hp.eps) * std::max(-hk, 0.0) * ipow(hk, hp.kappa);
  }
  t.penalty_term = hp.lambda_c * pen;
  t.loss = t.q_term + t.penalty_term;
  return t;
}

LossTerms loss(const NetParams& p, const TrainingSample& s, const Hyperparams& hp,
               double sigma2_watts) {
  const Precoder W = precode(p, s.data, hp.pd_watts());
  return loss_of_precoder(W.W(), p.mu, s.scene, hp, sigma2_watts);
}

TracedLoss trace_loss(ad::Tape& tape, ad::Var w, ad::Var mu, const Scene& scene,
                      const Hyperparams& hp, double sigma2_watts) {
  const int K = scene.K();
  const int T = scene.T();
  if (T < 1) throw InvalidArgument("trace_loss: scene has no targets");

  CMat gh(T, scene.M());
  for (int m = 0; m < T; ++m) gh.row(m) = scene.targets[static_cast<std::size_t>(m)].g.adjoint();
  const ad::Var target_lift = tape.constant(lift_rows(gh));
  const ad::Var q_all = tape.row_sum(tape.pair_power(tape.matmul(target_lift, w)));

  TracedLoss out;
  out.q = tape.min_entry(q_all);

  const ad::Var user_lift = tape.constant(lift_rows(scene.H));
  const ad::Var power = tape.pair_power(tape.matmul(user_lift, w));  // K x (M+K)
  const ad::Var signal = tape.diag(power);
  const ad::Var interference = tape.sub(tape.row_sum(power), signal);
  const ad::Var sinr = tape.div(signal, tape.add_const(interference, sigma2_watts));
  out.slack = tape.add_const(sinr, -hp.gamma_linear());
  (void)K;

  const ad::Var weight = tape.abs(tape.add_const(mu, hp.eps));
  const ad::Var hinge = tape.max_zero(tape.neg(out.slack));
  const ad::Var shaped = tape.pow_int(out.slack, hp.kappa);
  out.penalty = tape.scale(tape.sum(tape.mul(tape.mul(weight, hinge), shaped)), hp.lambda_c);
  out.loss = tape.add(tape.scale(out.q, hp.lambda_s), out.penalty);
  return out;
}

LossTerms accumulate_sample_grad(const NetParams& p, const TrainingSample& s,
                                 const Hyperparams& hp, double sigma2_watts, double weight,
                                 GradBundle& grad) {
  if (s.scene.K() != p.K()) throw ShapeError("training sample K differs from mu length");
  ad::Tape tape;
  const double mu_sign = hp.mu_update == MuUpdate::kDualAscent ? -weight : weight;
  const NetVars vars = bind_params(tape, p, grad.values, weight, mu_sign);
  const ad::Var w = trace_precoder(tape, vars, p, s.data, hp.pd_watts(), hp.norm_eps);
  const TracedLoss tl = trace_loss(tape, w, vars.mu, s.scene, hp, sigma2_watts);
  const ad::Var objective = tape.neg(tl.loss);

  LossTerms terms;
  terms.q = tape.scalar(tl.q);
  terms.q_term = hp.lambda_s * terms.q;
  terms.penalty_term = tape.scalar(tl.penalty);
  terms.loss = tape.scalar(tl.loss);
  terms.min_slack = tape.value(tl.slack).minCoeff();

  tape.backward(objective);
  return terms;
}

std::vector<LossTerms> accumulate_batch_grad(const NetParams& p,
                                             std::span<const TrainingSample> batch,
                                             const Hyperparams& hp, double sigma2_watts,
                                             GradBundle& grad) {
  if (batch.empty()) throw InvalidArgument("accumulate_batch_grad: empty batch");
  const double w = 1.0 / static_cast<double>(batch.size());
  ad::Tape tape;
  // The 1/B weighting lives in the objective, so sinks take the raw adjoint.
  const NetVars vars = bind_params(tape, p, grad.values, 1.0,
                                   hp.mu_update == MuUpdate::kDualAscent ? -1.0 : 1.0);

  const Eigen::Index two_m = 2 * p.M;
  Eigen::Index ky = 0, kz = 0;
  for (const TrainingSample& s : batch) {
    if (s.scene.K() != p.K()) throw ShapeError("training sample K differs from mu length");
    if (s.data.Y.rows() != p.M || s.data.Z.rows() != p.M || s.data.Z.cols() != p.M) {
      throw ShapeError("accumulate_batch_grad: sounding data shape mismatch");
    }
    ky += s.data.Y.cols();
    kz += s.data.Z.cols();
  }
  RMat ys(two_m, ky), zs(two_m, kz);
  Eigen::Index cy = 0, cz = 0;
  for (const TrainingSample& s : batch) {
    ys.middleCols(cy, s.data.Y.cols()) = p.scaling.pilots * c2r_stack(s.data.Y);
    zs.middleCols(cz, s.data.Z.cols()) = p.scaling.echoes * c2r_stack(s.data.Z);
    cy += s.data.Y.cols();
    cz += s.data.Z.cols();
  }
  auto run = [&](const std::vector<NetVars::LayerVars>& layers, ad::Var x) {
    for (const auto& l : layers) {
      x = tape.affine(l.weight, x, l.bias);
      if (l.activation == Activation::kRelu) x = tape.relu(x);
    }
    return x;
  };
  const ad::Var ly = run(vars.comm, tape.constant(std::move(ys)));
  const ad::Var lz = run(vars.sens, tape.constant(std::move(zs)));
  // Joint layout: all pilot columns, then all echo columns.
  const ad::Var raw = run(vars.isac, tape.hconcat(ly, lz));

  std::vector<LossTerms> out;
  std::vector<TracedLoss> traced;
  ad::Var total;
  cy = 0;
  cz = ky;
  for (const TrainingSample& s : batch) {
    const Eigen::Index k = s.data.Y.cols();
    const Eigen::Index m = s.data.Z.cols();
    const ad::Var w_raw =
        tape.hconcat(tape.col_slice(raw, cy, k), tape.col_slice(raw, cz, m));
    cy += k;
    cz += m;
    const ad::Var wn = tape.frob_normalize(w_raw, hp.pd_watts(), hp.norm_eps);
    const TracedLoss tl = trace_loss(tape, wn, vars.mu, s.scene, hp, sigma2_watts);
    traced.push_back(tl);
    const ad::Var term = tape.scale(tl.loss, -w);
    total = total.valid() ? tape.add(total, term) : term;
  }
  for (const TracedLoss& tl : traced) {
    LossTerms t;
    t.q = tape.scalar(tl.q);
    t.q_term = hp.lambda_s * t.q;
    t.penalty_term = tape.scalar(tl.penalty);
    t.loss = tape.scalar(tl.loss);
    t.min_slack = tape.value(tl.slack).minCoeff();
    out.push_back(t);
  }
  tape.backward(total);
  return out;
}

}  // namespace isacnet
