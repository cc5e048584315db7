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

#include <cstddef>
#include <functional>
#include <string>

#include "isacnet/autodiff.hpp"
#include "isacnet/metrics.hpp"
#include "isacnet/mlp.hpp"
#include "isacnet/sounding.hpp"

namespace isacnet {

/// Fixed (non-trained) gains applied to the real-stacked inputs before the first layer.
/// Received pilots and echoes are O(1e-3); without a gain the first-layer activations
/// are swamped by the biases as soon as the optimizer moves them.
struct InputScaling {
  double pilots = 1.0;
  double echoes = 1.0;
};

/// All trainable state: three MLPs plus the Lagrange multipliers.
///
///   comm: 2M -> 2d -> d   (ReLU, ReLU)
///   sens: 2M -> 2d -> d   (ReLU, ReLU)
///   isac: d -> d -> d -> 2d -> 2M   (ReLU x3, identity)
///
/// Every MLP is applied column by column with shared weights, so nothing depends on K.
struct NetParams {
  int M = 0;
  int d = 0;
  MlpParams comm;
  MlpParams sens;
  MlpParams isac;
  RMat mu;  ///< K x 1
  InputScaling scaling;

  int K() const { return static_cast<int>(mu.rows()); }
  void validate() const;
};

/// Uniform fan-in weights, zero biases, mu = 1.
NetParams init_params(int M, int K, int d, RngStream& rng);

/// Network parameter count; excludes mu, so it does not depend on K.
std::size_t param_count(const NetParams& p);
/// param_count + K.
std::size_t trainable_count(const NetParams& p);

/// Visits every tensor in declaration order (comm, sens, isac layers as weight then
/// bias, mu last). This order is the checkpoint blob order.
void for_each_tensor(NetParams& p, const std::function<void(const std::string&, RMat&)>& fn);
void for_each_tensor(const NetParams& p,
                     const std::function<void(const std::string&, const RMat&)>& fn);

/// Gradients laid out exactly like NetParams.
struct GradBundle {
  NetParams values;

  static GradBundle zeros_like(const NetParams& p);
  void set_zero();
  GradBundle& operator+=(const GradBundle& o);
  GradBundle& operator*=(double s);
  double squared_norm() const;
};

/// Pre-normalization network output W~ (2M x (M+K)): comm columns first, then sens.
RMat precode_raw(const NetParams& p, const SoundingData& data);

/// Full pipeline including the power normalization layer.
/// Throws DegenerateOutput when the raw output is all zero.
Precoder precode(const NetParams& p, const SoundingData& data, double pd_watts);

/// Tape handles for every tensor of a NetParams bound on one tape.
struct NetVars {
  struct LayerVars {
    ad::Var weight;
    ad::Var bias;
    Activation activation;
  };
  std::vector<LayerVars> comm, sens, isac;
  ad::Var mu;
};

NetVars bind_params(ad::Tape& tape, const NetParams& p);
/// Binds every tensor with a gradient sink in `sinks` (same layout as `p`).
NetVars bind_params(ad::Tape& tape, const NetParams& p, NetParams& sinks, double weight,
                    double mu_weight);

/// Records the network on `tape` and returns the normalized precoder as a real
/// 2M x (M+K) variable (rows 0..M-1 real parts, M..2M-1 imaginary parts).
/// `norm_eps` is added to the Frobenius norm in the normalization layer.
ad::Var trace_precoder(ad::Tape& tape, const NetVars& vars, const NetParams& p,
                       const SoundingData& data, double pd_watts, double norm_eps);

}  // namespace isacnet
