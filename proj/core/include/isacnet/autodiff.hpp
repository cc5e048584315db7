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
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "isacnet/numerics.hpp"

/// Reverse-mode differentiation over the closed set of matrix primitives used by the
/// precoder network and its training loss. Complex quantities are handled as stacked
/// real/imaginary pairs before they reach the tape.
namespace isacnet::ad {

enum class Primitive : std::uint8_t {
  kLeaf,
  kAffine,          ///< W X + b 1^T (b is a column, broadcast over columns)
  kMatMul,          ///< A X
  kRelu,
  kHConcat,         ///< [A, B]
  kScale,           ///< c X, attr = c
  kAddConst,        ///< X + c, attr = c
  kAdd,
  kSub,
  kMul,             ///< elementwise
  kDiv,             ///< elementwise
  kPowInt,          ///< X^n elementwise, attr = n
  kMaxZero,         ///< max(X, 0)
  kAbs,
  kNeg,
  kFrobNormalize,   ///< sqrt(P) X / (||X||_F + eps), attr = P, attr2 = eps
  kPairPower,       ///< rows (2r, 2r+1) -> X[2r]^2 + X[2r+1]^2
  kRowSum,
  kDiag,            ///< X (R x N, N >= R) -> column of X[r, r]
  kSum,
  kMinEntry,        ///< smallest entry (column-major order, lowest index on ties)
  kColSlice,        ///< columns [attr, attr + attr2)
  kCount_,
};

const char* primitive_name(Primitive p);

/// Handle into a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Record of a forward evaluation. Each node caches its value; backward() walks the
/// record once in reverse and accumulates adjoints.
///
/// Subgradient conventions: ReLU'(0) = 0, d|x|/dx(0) = 0, max(x,0)'(0) = 0, and the
/// min passes its adjoint only to the lowest-index argmin.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(RMat value);
  /// A differentiable leaf that refers to `value` without copying; `value` must outlive
  /// the tape.
  Var parameter(const RMat& value);
  /// As above, but the adjoint is added as `sink_weight * adjoint` straight into `sink`
  /// during backward() instead of being stored on the tape (grad() then reports zero).
  /// Lets a batch loop accumulate large weight gradients without per-sample copies.
  Var parameter(const RMat& value, RMat* sink, double sink_weight = 1.0);

  /// Generic entry point. Validates the primitive and its arity/shapes and records the
  /// node; throws InvalidArgument for a primitive without an adjoint rule.
  Var apply(Primitive p, std::initializer_list<Var> args, double attr = 0.0,
            double attr2 = 0.0);

  Var affine(Var W, Var X, Var b) { return apply(Primitive::kAffine, {W, X, b}); }
  Var matmul(Var A, Var X) { return apply(Primitive::kMatMul, {A, X}); }
  Var relu(Var x) { return apply(Primitive::kRelu, {x}); }
  Var hconcat(Var a, Var b) { return apply(Primitive::kHConcat, {a, b}); }
  Var scale(Var x, double c) { return apply(Primitive::kScale, {x}, c); }
  Var add_const(Var x, double c) { return apply(Primitive::kAddConst, {x}, c); }
  Var add(Var a, Var b) { return apply(Primitive::kAdd, {a, b}); }
  Var sub(Var a, Var b) { return apply(Primitive::kSub, {a, b}); }
  Var mul(Var a, Var b) { return apply(Primitive::kMul, {a, b}); }
  Var div(Var a, Var b) { return apply(Primitive::kDiv, {a, b}); }
  Var pow_int(Var x, int n) { return apply(Primitive::kPowInt, {x}, n); }
  Var max_zero(Var x) { return apply(Primitive::kMaxZero, {x}); }
  Var abs(Var x) { return apply(Primitive::kAbs, {x}); }
  Var neg(Var x) { return apply(Primitive::kNeg, {x}); }
  Var frob_normalize(Var x, double power, double eps = 0.0) {
    return apply(Primitive::kFrobNormalize, {x}, power, eps);
  }
  Var pair_power(Var x) { return apply(Primitive::kPairPower, {x}); }
  Var row_sum(Var x) { return apply(Primitive::kRowSum, {x}); }
  Var diag(Var x) { return apply(Primitive::kDiag, {x}); }
  Var sum(Var x) { return apply(Primitive::kSum, {x}); }
  Var min_entry(Var x) { return apply(Primitive::kMinEntry, {x}); }
  Var col_slice(Var x, Eigen::Index start, Eigen::Index count) {
    return apply(Primitive::kColSlice, {x}, static_cast<double>(start),
                 static_cast<double>(count));
  }

  const RMat& value(Var v) const;
  double scalar(Var v) const;

  /// Seeds d(out)/d(out) = 1 for a 1x1 output. May be called once per tape.
  void backward(Var out);
  bool consumed() const { return consumed_; }

  /// Adjoint of leaf `v` (intermediate adjoints are released during backward()); a zero
  /// matrix of matching shape if nothing reached it.
  RMat grad(Var v) const;
  /// Adds `weight * grad(v)` into `dst` without materializing a copy.
  void accumulate_grad(Var v, RMat& dst, double weight = 1.0) const;
  /// Sum of adjoints over every parameter leaf bound to the object `p`.
  RMat grad_for(const RMat& p) const;

  /// Hash of every branch decision taken by ReLU / max / |.| / min nodes.
  /// Two evaluations with equal signatures are on the same smooth piece.
  std::uint64_t branch_signature() const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Primitive op = Primitive::kLeaf;
    int a = -1, b = -1, c = -1;
    double attr = 0.0, attr2 = 0.0;
    RMat own;
    const RMat* ref = nullptr;
    RMat* sink = nullptr;
    double sink_weight = 1.0;
    RMat grad;
    bool has_grad = false;
    bool needs_grad = false;
    Eigen::Index arg = 0;  // argmin for kMinEntry
    double aux = 0.0;      // cached norm for kFrobNormalize

    const RMat& val() const { return ref ? *ref : own; }
  };

  Var push(Node n);
  void add_grad(int id, const RMat& g);
  template <typename Expr>
  void add_grad_expr(int id, const Expr& g);
  void backward_node(Node& n);
  const Node& node(Var v) const;

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

/// Result of comparing analytic gradients against central differences.
struct FdReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded = 0;  ///< coordinates whose +-step moved across a kink
  std::size_t failures = 0;
  bool passed = true;
  struct Entry {
    std::size_t tensor;
    Eigen::Index index;
    double analytic;
    double numeric;
    double rel_error;
  };
  std::vector<Entry> worst;  ///< up to 8 largest relative errors
};

struct FdOptions {
  double step = 1e-5;
  double tolerance = 1e-6;
  /// Denominator floor for the relative error; |a-n| / max(|a|, |n|, floor).
  double abs_floor = 1e-8;
  /// Optional cap on coordinates checked per tensor (0 = all).
  std::size_t max_per_tensor = 0;
};

/// `f` builds a scalar on the tape it is given; it must read `params` through
/// Tape::parameter so that perturbations are observed.
using TracedFn = std::function<Var(Tape&)>;

/// Evaluates `f` once with gradients, then perturbs each coordinate of each tensor in
/// `params` by +-step. Coordinates whose perturbed evaluations change the branch
/// signature (within a step of a ReLU/min/max/|.| kink) are excluded and counted.
FdReport finite_diff_check(const TracedFn& f, std::span<RMat* const> params,
                           const FdOptions& opts = {});

/// Convenience: value and gradients of `f` w.r.t. `params`.
double eval_with_grad(const TracedFn& f, std::span<RMat* const> params,
                      std::vector<RMat>& grads);

}  // namespace isacnet::ad
