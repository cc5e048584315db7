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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "isacnet/autodiff.hpp"
#include "isacnet/precoder_net.hpp"
#include "isacnet/scene.hpp"
#include "isacnet/sounding.hpp"

namespace isacnet {

/// How the multipliers move. kDescent follows the gradient of -loss exactly as the
/// objective is written (joint argmin over network weights and mu). kDualAscent flips the
/// sign of the mu gradient, the classical multiplier update.
enum class MuUpdate { kDescent, kDualAscent };

struct Hyperparams {
  int d = 1024;
  double lambda_s = 1e7;
  double lambda_c = 1.0;
  int kappa = 3;
  double eps = 1e-3;
  double gamma_db = 5.0;
  double learning_rate = 1e-4;
  int epochs = 2000;
  int batches_per_epoch = 10;
  int batch_size = 10;
  double pd_dbw = 0.0;
  MuUpdate mu_update = MuUpdate::kDescent;
  /// Denominator guard of the normalization layer while training.
  double norm_eps = 1e-12;
  /// Samples used to set InputScaling before the first step.
  int calibration_samples = 64;

  double pd_watts() const { return db_to_linear(pd_dbw); }
  double gamma_linear() const { return db_to_linear(gamma_db); }
  void validate() const;
};

MuUpdate mu_update_mode(const Hyperparams& hp);

/// One (scene, sounding) realization; the network sees only `data`, the loss uses the
/// true channels in `scene`.
struct TrainingSample {
  Scene scene;
  SoundingData data;
};

TrainingSample draw_sample(const SceneConfig& scfg, const SoundingConfig& sounding,
                           RngStream& rng);

struct LossTerms {
  double loss = 0.0;      ///< l = q_term + penalty_term
  double q = 0.0;         ///< worst-case illumination, watts
  double q_term = 0.0;    ///< lambda_s * q
  double penalty_term = 0.0;
  double min_slack = 0.0; ///< min_k h_k
};

/// l = lambda_s Q + lambda_c sum_k |mu_k + eps| max(-h_k, 0) h_k^kappa evaluated through
/// plain forward arithmetic (no tape). Training minimizes -l.
LossTerms loss(const NetParams& p, const TrainingSample& s, const Hyperparams& hp,
               double sigma2_watts);

/// Same loss given an already-computed precoder matrix and multipliers.
LossTerms loss_of_precoder(const CMat& W, const RMat& mu, const Scene& scene,
                           const Hyperparams& hp, double sigma2_watts);

/// Records l on `tape` from a traced 2M x (M+K) real precoder `w`. `mu` is a K x 1 var.
struct TracedLoss {
  ad::Var loss;
  ad::Var q;
  ad::Var slack;    ///< K x 1
  ad::Var penalty;  ///< scalar
};
TracedLoss trace_loss(ad::Tape& tape, ad::Var w, ad::Var mu, const Scene& scene,
                      const Hyperparams& hp, double sigma2_watts);

/// Adds weight * d(-l)/dParams for one sample into `grad` (mu gradient sign follows
/// hp.mu_update). Returns the loss terms.
LossTerms accumulate_sample_grad(const NetParams& p, const TrainingSample& s,
                                 const Hyperparams& hp, double sigma2_watts, double weight,
                                 GradBundle& grad);

/// Batch version: one trace over the whole batch (every MLP runs on the concatenated
/// columns of all samples), adding d(-mean l)/dParams into `grad`. Mathematically equal
/// to the mean of per-sample gradients; far faster because each weight matrix is read
/// once per batch.
std::vector<LossTerms> accumulate_batch_grad(const NetParams& p,
                                             std::span<const TrainingSample> batch,
                                             const Hyperparams& hp, double sigma2_watts,
                                             GradBundle& grad);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct BatchRecord {
  int epoch = 0;
  int batch = 0;
  double neg_loss = 0.0;  ///< batch mean of -l
  double q_term = 0.0;
  double penalty_term = 0.0;
  double min_slack = 0.0;  ///< min over batch and users of h_k
  double grad_norm = 0.0;
};

struct TrainState {
  NetParams params;
  GradBundle m;
  GradBundle v;
  long long step = 0;
  std::vector<BatchRecord> history;

  explicit TrainState(NetParams p);
};

/// Bias-corrected Adam over every tensor (network weights and mu jointly).
void adam_step(TrainState& state, const GradBundle& grad, double lr,
               const AdamConfig& cfg = {});

struct TrainOptions {
  int threads = 1;
  /// Called after every batch; returning false stops training early.
  std::function<bool(const BatchRecord&)> on_batch;
};

struct TrainResult {
  NetParams params;
  std::vector<BatchRecord> history;
};

/// Initial network as train() builds it: init_params from stream 0 and InputScaling
/// calibrated on hp.calibration_samples draws.
NetParams initial_params(const SceneConfig& scfg, const SoundingConfig& sounding,
                         const Hyperparams& hp, std::uint64_t seed);

/// epochs x batches x batch_size fresh samples; one Adam step per batch on the mean of
/// -l. Deterministic for a given seed regardless of `threads`. Throws NumericalFailure
/// if the loss becomes NaN/Inf.
TrainResult train(const SceneConfig& scfg, const SoundingConfig& sounding,
                  const Hyperparams& hp, std::uint64_t seed, const TrainOptions& opts = {});

/// Stream tags for train(); exposed so tests can regenerate training samples.
inline constexpr std::uint64_t kInitStream = 0;
inline constexpr std::uint64_t kCalibrationStream = 1;
inline constexpr std::uint64_t kTrainStream = 2;

}  // namespace isacnet
