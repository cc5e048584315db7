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
#include <string>
#include <vector>

#include "isacnet/checkpoint.hpp"
#include "isacnet/config.hpp"
#include "isacnet/report.hpp"

namespace isacnet {

inline constexpr const char* kMethodProposed = "proposed";
inline constexpr const char* kMethodPerfectCsi = "perfect-csi";
inline constexpr const char* kMethodEstimatedCsi = "estimated-csi";

/// Stream tag of evaluation realizations under the eval seed.
inline constexpr std::uint64_t kEvalStream = 3;

/// One evaluation setting: the world to draw and the power / target to apply.
struct EvalPoint {
  SceneConfig scene;
  SoundingConfig sounding;
  double pd_dbw = 0.0;
  double gamma_db = 5.0;
  std::string axis = "none";
  double sweep_value = 0.0;
};

/// Base point of a config: its scene and sounding, eval.pd_dbw, train.gamma_db.
EvalPoint base_point(const ExperimentConfig& cfg);
/// The i-th point of the configured sweep (i < cfg.sweep.size()).
EvalPoint sweep_point(const ExperimentConfig& cfg, std::size_t i);

struct EvalMethods {
  const NetParams* proposed = nullptr;  ///< null skips the proposed method
  bool perfect_csi = false;
  bool estimated_csi = false;
};

/// Runs every requested method on the same `realizations` draws (fresh channels and
/// fresh sounding noise per draw, realization i uses RngStream(seed, kEvalStream).split(i)).
/// Draws are spread over `threads` workers; aggregation is in realization order, so the
/// metric columns do not depend on `threads`.
std::vector<ResultRow> evaluate_point(const EvalPoint& pt, const EvalMethods& methods,
                                      const OptimizerOptions& baseline, int realizations,
                                      std::uint64_t seed, int threads);

/// The realizations evaluate_point draws, for caching with save_dataset.
std::vector<TrainingSample> eval_samples(const EvalPoint& pt, int realizations,
                                         std::uint64_t seed);

/// Throws ConfigError unless the checkpoint's M and d match the config.
void check_compatible(const NetParams& p, const ExperimentConfig& cfg);

struct HarnessOptions {
  int threads = 1;
  std::function<bool(const BatchRecord&)> on_batch;
};

/// Trains with cfg.seed. Returns the checkpoint (also the history through `history`).
Checkpoint run_train(const ExperimentConfig& cfg, const HarnessOptions& opts,
                     std::vector<BatchRecord>* history = nullptr);

/// Evaluates a checkpoint at the base point. K of the config may differ from the
/// checkpoint's K; the network is never retrained.
std::vector<ResultRow> run_eval(const Checkpoint& ckpt, const ExperimentConfig& cfg,
                                const HarnessOptions& opts);

/// Iterates the configured sweep. The proposed network is `ckpt` at every point, except
/// on the gamma_db axis where the target enters the loss and a network is trained per
/// value (with cfg.seed). Throws ConfigError when the axis is none.
std::vector<ResultRow> run_sweep(const std::optional<Checkpoint>& ckpt,
                                 const ExperimentConfig& cfg, const HarnessOptions& opts);

/// Baselines only, at every sweep point (or the base point when the axis is none).
std::vector<ResultRow> run_baseline(const ExperimentConfig& cfg, const HarnessOptions& opts);

/// Median single-inference wall-clock of `p` for each K in cfg.scaling.k_values.
std::vector<ScalingPoint> run_scaling(const NetParams& p, const ExperimentConfig& cfg);

/// Multiply-add count x 2 of one forward pass with K users.
double inference_flops(const NetParams& p, int K);

/// Q-vs-axis and gamma_min-vs-axis plots (with the target line) from sweep rows.
std::vector<std::pair<std::string, std::string>> sweep_plots(const std::vector<ResultRow>& rows,
                                                             double gamma_db);

}  // namespace isacnet
