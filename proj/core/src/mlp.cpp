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

#include "isacnet/mlp.hpp"

#include <cmath>
#include <string>

#include "isacnet/errors.hpp"

namespace isacnet {

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("MLP has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.bias.rows() != l.out() || l.bias.cols() != 1) {
      throw ShapeError("MLP layer " + std::to_string(i) + ": bias must be out x 1");
    }
    if (i > 0 && layers[i - 1].out() != l.in()) {
      throw ShapeError("MLP layer " + std::to_string(i) + ": input " + std::to_string(l.in()) +
                       " does not match previous output " +
                       std::to_string(layers[i - 1].out()));
    }
  }
}

MlpParams make_mlp(std::span<const int> dims, Activation last, RngStream& rng) {
  if (dims.size() < 2) throw InvalidArgument("make_mlp: need at least two sizes");
  MlpParams p;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int in = dims[i];
    const int out = dims[i + 1];
    if (in < 1 || out < 1) throw InvalidArgument("make_mlp: sizes must be positive");
    Layer l;
    const double bound = std::sqrt(1.0 / in);
    l.weight.resize(out, in);
    // Fill row-by-row so the draw order matches the row-major checkpoint layout.
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) l.weight(r, c) = rng.uniform(-bound, bound);
    }
    l.bias = RMat::Zero(out, 1);
    l.activation = (i + 2 == dims.size()) ? last : Activation::kRelu;
    p.layers.push_back(std::move(l));
  }
  return p;
}

RMat mlp_forward_columns(const MlpParams& p, const RMat& X) {
  if (X.rows() != p.input_size()) {
    throw ShapeError("mlp_forward: input size " + std::to_string(X.rows()) + ", expected " +
                     std::to_string(p.input_size()));
  }
  RMat h = X;
  for (const Layer& l : p.layers) {
    RMat next = l.weight * h;
    next.colwise() += l.bias.col(0);
    if (l.activation == Activation::kRelu) next = next.cwiseMax(0.0);
    h = std::move(next);
  }
  return h;
}

RVec mlp_forward(const MlpParams& p, const RVec& x) {
  return mlp_forward_columns(p, RMat(x)).col(0);
}

}  // namespace isacnet
