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

#include "isacnet/training.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "isacnet/errors.hpp"

namespace isacnet {

TrainingSample draw_sample(const SceneConfig& scfg, const SoundingConfig& sounding,
                           RngStream& rng) {
  TrainingSample s;
  s.scene = sample_scene(scfg, rng);
  s.data = acquire(s.scene, sounding, scfg.nu2_watts(), rng);
  return s;
}

TrainState::TrainState(NetParams p)
    : params(std::move(p)), m(GradBundle::zeros_like(params)), v(GradBundle::zeros_like(params)) {}

void adam_step(TrainState& state, const GradBundle& grad, double lr, const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);

  std::vector<const RMat*> g;
  for_each_tensor(grad.values, [&](const std::string&, const RMat& x) { g.push_back(&x); });
  std::vector<RMat*> m;
  for_each_tensor(state.m.values, [&](const std::string&, RMat& x) { m.push_back(&x); });
  std::vector<RMat*> v;
  for_each_tensor(state.v.values, [&](const std::string&, RMat& x) { v.push_back(&x); });

  std::size_t i = 0;
  for_each_tensor(state.params, [&](const std::string& name, RMat& p) {
    const RMat& gi = *g.at(i);
    RMat& mi = *m.at(i);
    RMat& vi = *v.at(i);
    ++i;
    if (gi.rows() != p.rows() || gi.cols() != p.cols()) {
      throw ShapeError("adam_step: gradient shape mismatch for " + name);
    }
    mi = cfg.beta1 * mi + (1.0 - cfg.beta1) * gi;
    vi = cfg.beta2 * vi + (1.0 - cfg.beta2) * gi.cwiseAbs2();
    p.array() -= lr * (mi.array() / c1) / ((vi.array() / c2).sqrt() + cfg.eps);
  });
}

NetParams initial_params(const SceneConfig& scfg, const SoundingConfig& sounding,
                         const Hyperparams& hp, std::uint64_t seed) {
  scfg.validate();
  sounding.validate(scfg.M, scfg.K);
  hp.validate();
  RngStream init(seed, kInitStream);
  NetParams p = init_params(scfg.M, scfg.K, hp.d, init);

  RngStream calib(seed, kCalibrationStream);
  double sy = 0.0, sz = 0.0;
  Eigen::Index ny = 0, nz = 0;
  for (int i = 0; i < hp.calibration_samples; ++i) {
    RngStream r = calib.split(static_cast<std::uint64_t>(i));
    const TrainingSample s = draw_sample(scfg, sounding, r);
    sy += s.data.Y.squaredNorm();
    sz += s.data.Z.squaredNorm();
    ny += 2 * s.data.Y.size();
    nz += 2 * s.data.Z.size();
  }
  // RMS of the real-stacked entries -> 1.
  if (sy > 0.0) p.scaling.pilots = 1.0 / std::sqrt(sy / static_cast<double>(ny));
  if (sz > 0.0) p.scaling.echoes = 1.0 / std::sqrt(sz / static_cast<double>(nz));
  return p;
}

namespace {

bool finite(const GradBundle& g) {
  bool ok = true;
  for_each_tensor(g.values, [&](const std::string&, const RMat& t) { ok = ok && t.allFinite(); });
  return ok;
}

}  // namespace

TrainResult train(const SceneConfig& scfg, const SoundingConfig& sounding,
                  const Hyperparams& hp, std::uint64_t seed, const TrainOptions& opts) {
  TrainState state(initial_params(scfg, sounding, hp, seed));
  const double sigma2 = scfg.sigma2_watts();
  const int B = hp.batch_size;
  const double w = 1.0 / B;
  const int threads = std::max(1, std::min(opts.threads, B));
  RngStream base(seed, kTrainStream);

  GradBundle grad = GradBundle::zeros_like(state.params);
  std::vector<TrainingSample> samples(static_cast<std::size_t>(B));

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (int batch = 0; batch < hp.batches_per_epoch; ++batch) {
      const long long first =
          (static_cast<long long>(epoch) * hp.batches_per_epoch + batch) * B;
      auto draw = [&](int i) {
        RngStream r = base.split(static_cast<std::uint64_t>(first + i));
        samples[static_cast<std::size_t>(i)] = draw_sample(scfg, sounding, r);
      };
      // Each sample has its own stream, so the draw is independent of thread count.
      if (threads == 1) {
        for (int i = 0; i < B; ++i) draw(i);
      } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            for (int i = t; i < B; i += threads) draw(i);
          });
        }
        for (auto& th : pool) th.join();
      }
      grad.set_zero();
      const std::vector<LossTerms> terms =
          accumulate_batch_grad(state.params, samples, hp, sigma2, grad);

      BatchRecord rec;
      rec.epoch = epoch;
      rec.batch = batch;
      rec.min_slack = std::numeric_limits<double>::infinity();
      for (const LossTerms& t : terms) {
        rec.neg_loss -= t.loss * w;
        rec.q_term += t.q_term * w;
        rec.penalty_term += t.penalty_term * w;
        rec.min_slack = std::min(rec.min_slack, t.min_slack);
      }
      rec.grad_norm = std::sqrt(grad.squared_norm());
      if (!std::isfinite(rec.neg_loss) || !finite(grad)) {
        throw NumericalFailure("training diverged at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batch));
      }
      adam_step(state, grad, hp.learning_rate);
      state.history.push_back(rec);
      if (opts.on_batch && !opts.on_batch(rec)) {
        return {std::move(state.params), std::move(state.history)};
      }
    }
  }
  return {std::move(state.params), std::move(state.history)};
}

}  // namespace isacnet
