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

namespace isacnet {

enum class Activation { kRelu, kIdentity };

struct Layer {
  RMat weight;  ///< out x in
  RMat bias;    ///< out x 1
  Activation activation = Activation::kRelu;

  Eigen::Index in() const { return weight.cols(); }
  Eigen::Index out() const { return weight.rows(); }
};

struct MlpParams {
  std::vector<Layer> layers;

  Eigen::Index input_size() const { return layers.empty() ? 0 : layers.front().in(); }
  Eigen::Index output_size() const { return layers.empty() ? 0 : layers.back().out(); }
  std::size_t param_count() const;
  /// Throws ShapeError if consecutive layers do not chain or a bias is mis-sized.
  void validate() const;
};

/// Layer sizes dims[0] -> dims[1] -> ... ; every layer ReLU except the last, which uses
/// `last`. Weights ~ U(-sqrt(1/fan_in), +sqrt(1/fan_in)), biases zero.
MlpParams make_mlp(std::span<const int> dims, Activation last, RngStream& rng);

RVec mlp_forward(const MlpParams& p, const RVec& x);
/// Applies the MLP to every column of X.
RMat mlp_forward_columns(const MlpParams& p, const RMat& X);

}  // namespace isacnet
