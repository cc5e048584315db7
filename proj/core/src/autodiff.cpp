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

#include "isacnet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isacnet/errors.hpp"

namespace isacnet::ad {

namespace {

int arity(Primitive p) {
  switch (p) {
    case Primitive::kAffine:
      return 3;
    case Primitive::kMatMul:
    case Primitive::kHConcat:
    case Primitive::kAdd:
    case Primitive::kSub:
    case Primitive::kMul:
    case Primitive::kDiv:
      return 2;
    case Primitive::kRelu:
    case Primitive::kScale:
    case Primitive::kAddConst:
    case Primitive::kPowInt:
    case Primitive::kMaxZero:
    case Primitive::kAbs:
    case Primitive::kNeg:
    case Primitive::kFrobNormalize:
    case Primitive::kPairPower:
    case Primitive::kRowSum:
    case Primitive::kDiag:
    case Primitive::kSum:
    case Primitive::kMinEntry:
    case Primitive::kColSlice:
      return 1;
    default:
      return -1;
  }
}

std::string shape_str(const RMat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const RMat& a, const RMat& b, Primitive p) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(primitive_name(p)) + ": shapes " + shape_str(a) + " and " +
                     shape_str(b) + " differ");
  }
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

}  // namespace

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::kLeaf: return "leaf";
    case Primitive::kAffine: return "affine";
    case Primitive::kMatMul: return "matmul";
    case Primitive::kRelu: return "relu";
    case Primitive::kHConcat: return "hconcat";
    case Primitive::kScale: return "scale";
    case Primitive::kAddConst: return "add_const";
    case Primitive::kAdd: return "add";
    case Primitive::kSub: return "sub";
    case Primitive::kMul: return "mul";
    case Primitive::kDiv: return "div";
    case Primitive::kPowInt: return "pow_int";
    case Primitive::kMaxZero: return "max_zero";
    case Primitive::kAbs: return "abs";
    case Primitive::kNeg: return "neg";
    case Primitive::kFrobNormalize: return "frob_normalize";
    case Primitive::kPairPower: return "pair_power";
    case Primitive::kRowSum: return "row_sum";
    case Primitive::kDiag: return "diag";
    case Primitive::kSum: return "sum";
    case Primitive::kMinEntry: return "min_entry";
    case Primitive::kColSlice: return "col_slice";
    default: return "unknown";
  }
}

Var Tape::push(Node n) {
  if (consumed_) throw InvalidArgument("tape: cannot record after backward()");
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw InvalidArgument("tape: invalid variable handle");
  }
  return nodes_[static_cast<std::size_t>(v.id)];
}

Var Tape::constant(RMat value) {
  Node n;
  n.own = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(const RMat& value) {
  Node n;
  n.ref = &value;
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(const RMat& value, RMat* sink, double sink_weight) {
  if (sink != nullptr && (sink->rows() != value.rows() || sink->cols() != value.cols())) {
    throw ShapeError("parameter: sink " + shape_str(*sink) + " vs value " + shape_str(value));
  }
  Node n;
  n.ref = &value;
  n.sink = sink;
  n.sink_weight = sink_weight;
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::apply(Primitive p, std::initializer_list<Var> args, double attr, double attr2) {
  const int want = arity(p);
  if (want < 0) {
    throw InvalidArgument("tape: primitive '" + std::string(primitive_name(p)) +
                          "' (code " + std::to_string(static_cast<int>(p)) +
                          ") has no adjoint rule");
  }
  if (static_cast<int>(args.size()) != want) {
    throw InvalidArgument(std::string(primitive_name(p)) + ": expected " +
                          std::to_string(want) + " operands");
  }
  const Var* in = args.begin();
  Node n;
  n.op = p;
  n.attr = attr;
  n.attr2 = attr2;
  n.a = in[0].id;
  if (want > 1) n.b = in[1].id;
  if (want > 2) n.c = in[2].id;
  for (const Var& v : args) n.needs_grad = n.needs_grad || node(v).needs_grad;

  const RMat& x = node(in[0]).val();
  switch (p) {
    case Primitive::kAffine: {
      const RMat& X = node(in[1]).val();
      const RMat& b = node(in[2]).val();
      if (x.cols() != X.rows() || b.rows() != x.rows() || b.cols() != 1) {
        throw ShapeError("affine: W " + shape_str(x) + ", X " + shape_str(X) + ", b " +
                         shape_str(b));
      }
      n.own.noalias() = x * X;
      n.own.colwise() += b.col(0);
      break;
    }
    case Primitive::kMatMul: {
      const RMat& X = node(in[1]).val();
      if (x.cols() != X.rows()) {
        throw ShapeError("matmul: " + shape_str(x) + " * " + shape_str(X));
      }
      n.own.noalias() = x * X;
      break;
    }
    case Primitive::kRelu:
      n.own = x.cwiseMax(0.0);
      break;
    case Primitive::kHConcat: {
      const RMat& y = node(in[1]).val();
      if (x.rows() != y.rows()) {
        throw ShapeError("hconcat: " + shape_str(x) + " | " + shape_str(y));
      }
      n.own.resize(x.rows(), x.cols() + y.cols());
      n.own << x, y;
      break;
    }
    case Primitive::kScale:
      n.own = attr * x;
      break;
    case Primitive::kAddConst:
      n.own = x.array() + attr;
      break;
    case Primitive::kAdd:
      require_same_shape(x, node(in[1]).val(), p);
      n.own = x + node(in[1]).val();
      break;
    case Primitive::kSub:
      require_same_shape(x, node(in[1]).val(), p);
      n.own = x - node(in[1]).val();
      break;
    case Primitive::kMul:
      require_same_shape(x, node(in[1]).val(), p);
      n.own = x.cwiseProduct(node(in[1]).val());
      break;
    case Primitive::kDiv:
      require_same_shape(x, node(in[1]).val(), p);
      n.own = x.cwiseQuotient(node(in[1]).val());
      break;
    case Primitive::kPowInt: {
      const int e = static_cast<int>(attr);
      if (e < 1 || static_cast<double>(e) != attr) {
        throw InvalidArgument("pow_int: exponent must be a positive integer");
      }
      n.own = x.unaryExpr([e](double v) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= v;
        return r;
      });
      break;
    }
    case Primitive::kMaxZero:
      n.own = x.cwiseMax(0.0);
      break;
    case Primitive::kAbs:
      n.own = x.cwiseAbs();
      break;
    case Primitive::kNeg:
      n.own = -x;
      break;
    case Primitive::kFrobNormalize: {
      if (attr < 0.0 || attr2 < 0.0) {
        throw InvalidArgument("frob_normalize: power and eps must be nonnegative");
      }
      const double norm = x.norm();
      if (norm + attr2 == 0.0) {
        throw DegenerateOutput("frob_normalize: input has zero Frobenius norm");
      }
      n.aux = norm;
      n.own = (std::sqrt(attr) / (norm + attr2)) * x;
      break;
    }
    case Primitive::kPairPower: {
      if (x.rows() % 2 != 0) throw ShapeError("pair_power: odd row count " + shape_str(x));
      const Eigen::Index r = x.rows() / 2;
      n.own.resize(r, x.cols());
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < r; ++i) {
          const double re = x(2 * i, j);
          const double im = x(2 * i + 1, j);
          n.own(i, j) = re * re + im * im;
        }
      }
      break;
    }
    case Primitive::kRowSum:
      n.own = x.rowwise().sum();
      break;
    case Primitive::kDiag: {
      if (x.cols() < x.rows()) throw ShapeError("diag: need cols >= rows, got " + shape_str(x));
      n.own = x.diagonal().head(x.rows());
      break;
    }
    case Primitive::kSum:
      n.own = RMat::Constant(1, 1, x.sum());
      break;
    case Primitive::kMinEntry: {
      if (x.size() == 0) throw InvalidArgument("min_entry: empty operand");
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < x.size(); ++i) {
        if (x.data()[i] < x.data()[best]) best = i;
      }
      n.arg = best;
      n.own = RMat::Constant(1, 1, x.data()[best]);
      break;
    }
    case Primitive::kColSlice: {
      const auto start = static_cast<Eigen::Index>(attr);
      const auto count = static_cast<Eigen::Index>(attr2);
      if (start < 0 || count < 0 || start + count > x.cols() ||
          static_cast<double>(start) != attr || static_cast<double>(count) != attr2) {
        throw ShapeError("col_slice: columns [" + std::to_string(attr) + ", +" +
                         std::to_string(attr2) + ") out of " + shape_str(x));
      }
      n.own = x.middleCols(start, count);
      break;
    }
    default:
      throw InvalidArgument("tape: unhandled primitive");
  }
  return push(std::move(n));
}

const RMat& Tape::value(Var v) const { return node(v).val(); }

double Tape::scalar(Var v) const {
  const RMat& m = value(v);
  if (m.size() != 1) throw ShapeError("tape: scalar() on " + shape_str(m));
  return m(0, 0);
}

void Tape::add_grad(int id, const RMat& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.needs_grad) return;
  if (n.sink != nullptr) {
    n.sink->noalias() += n.sink_weight * g;
    return;
  }
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

template <typename Expr>
void Tape::add_grad_expr(int id, const Expr& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.needs_grad) return;
  if (n.sink != nullptr) {
    n.sink->noalias() += n.sink_weight * g;
    return;
  }
  if (n.has_grad) {
    n.grad += g;
  } else {
    n.grad = g;
    n.has_grad = true;
  }
}

void Tape::backward(Var out) {
  if (consumed_) throw InvalidArgument("tape: backward() already consumed this trace");
  const Node& o = node(out);
  if (o.val().size() != 1) throw ShapeError("backward: output must be 1x1");
  consumed_ = true;
  for (Node& n : nodes_) n.has_grad = false;
  nodes_[static_cast<std::size_t>(out.id)].grad = RMat::Ones(1, 1);
  nodes_[static_cast<std::size_t>(out.id)].has_grad = true;
  for (std::size_t i = static_cast<std::size_t>(out.id) + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad || !n.needs_grad || n.op == Primitive::kLeaf) continue;
    backward_node(n);
    // Intermediate adjoints are no longer needed once propagated.
    if (n.op != Primitive::kLeaf) {
      n.grad.resize(0, 0);
      n.has_grad = false;
    }
  }
}

void Tape::backward_node(Node& n) {
  const RMat& g = n.grad;
  auto in = [&](int id) -> const Node& { return nodes_[static_cast<std::size_t>(id)]; };
  auto wants = [&](int id) { return id >= 0 && in(id).needs_grad; };

  switch (n.op) {
    case Primitive::kAffine: {
      const RMat& W = in(n.a).val();
      const RMat& X = in(n.b).val();
      if (wants(n.a)) {
        Node& w = nodes_[static_cast<std::size_t>(n.a)];
        if (w.sink != nullptr) {
          w.sink->noalias() += (w.sink_weight * g) * X.transpose();
        } else if (w.has_grad) {
          w.grad.noalias() += g * X.transpose();
        } else {
          w.grad.noalias() = g * X.transpose();
          w.has_grad = true;
        }
      }
      if (wants(n.b)) add_grad_expr(n.b, W.transpose() * g);
      if (wants(n.c)) add_grad_expr(n.c, g.rowwise().sum());
      break;
    }
    case Primitive::kMatMul: {
      const RMat& A = in(n.a).val();
      const RMat& X = in(n.b).val();
      if (wants(n.a)) add_grad_expr(n.a, g * X.transpose());
      if (wants(n.b)) add_grad_expr(n.b, A.transpose() * g);
      break;
    }
    case Primitive::kRelu: {
      const RMat& x = in(n.a).val();
      add_grad_expr(n.a, g.cwiseProduct((x.array() > 0.0).cast<double>().matrix()));
      break;
    }
    case Primitive::kHConcat: {
      const Eigen::Index ca = in(n.a).val().cols();
      const Eigen::Index cb = in(n.b).val().cols();
      if (wants(n.a)) add_grad_expr(n.a, g.leftCols(ca));
      if (wants(n.b)) add_grad_expr(n.b, g.rightCols(cb));
      break;
    }
    case Primitive::kScale:
      add_grad_expr(n.a, n.attr * g);
      break;
    case Primitive::kAddConst:
      add_grad(n.a, g);
      break;
    case Primitive::kAdd:
      if (wants(n.a)) add_grad(n.a, g);
      if (wants(n.b)) add_grad(n.b, g);
      break;
    case Primitive::kSub:
      if (wants(n.a)) add_grad(n.a, g);
      if (wants(n.b)) add_grad_expr(n.b, -g);
      break;
    case Primitive::kMul: {
      const RMat& x = in(n.a).val();
      const RMat& y = in(n.b).val();
      if (wants(n.a)) add_grad_expr(n.a, g.cwiseProduct(y));
      if (wants(n.b)) add_grad_expr(n.b, g.cwiseProduct(x));
      break;
    }
    case Primitive::kDiv: {
      const RMat& x = in(n.a).val();
      const RMat& y = in(n.b).val();
      if (wants(n.a)) add_grad_expr(n.a, g.cwiseQuotient(y));
      if (wants(n.b)) {
        add_grad_expr(n.b, -(g.array() * x.array() / (y.array() * y.array())).matrix());
      }
      break;
    }
    case Primitive::kPowInt: {
      const RMat& x = in(n.a).val();
      const int e = static_cast<int>(n.attr);
      RMat d = x.unaryExpr([e](double v) {
        double r = static_cast<double>(e);
        for (int i = 0; i < e - 1; ++i) r *= v;
        return r;
      });
      add_grad_expr(n.a, g.cwiseProduct(d));
      break;
    }
    case Primitive::kMaxZero: {
      const RMat& x = in(n.a).val();
      add_grad_expr(n.a, g.cwiseProduct((x.array() > 0.0).cast<double>().matrix()));
      break;
    }
    case Primitive::kAbs: {
      const RMat& x = in(n.a).val();
      RMat s = x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      add_grad_expr(n.a, g.cwiseProduct(s));
      break;
    }
    case Primitive::kNeg:
      add_grad_expr(n.a, -g);
      break;
    case Primitive::kFrobNormalize: {
      // y = s x / (r + e), r = ||x||:  dx = s/(r+e) g - s x (x.g) / ((r+e)^2 r)
      const RMat& x = in(n.a).val();
      const double s = std::sqrt(n.attr);
      const double r = n.aux;
      const double den = r + n.attr2;
      if (r > 0.0) {
        const double xg = (x.array() * g.array()).sum();
        add_grad_expr(n.a, (s / den) * g - (s * xg / (den * den * r)) * x);
      } else {
        add_grad_expr(n.a, (s / den) * g);
      }
      break;
    }
    case Primitive::kPairPower: {
      const RMat& x = in(n.a).val();
      RMat d(x.rows(), x.cols());
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          d(2 * i, j) = 2.0 * x(2 * i, j) * g(i, j);
          d(2 * i + 1, j) = 2.0 * x(2 * i + 1, j) * g(i, j);
        }
      }
      add_grad(n.a, d);
      break;
    }
    case Primitive::kRowSum: {
      const RMat& x = in(n.a).val();
      add_grad_expr(n.a, g.col(0).replicate(1, x.cols()));
      break;
    }
    case Primitive::kDiag: {
      const RMat& x = in(n.a).val();
      RMat d = RMat::Zero(x.rows(), x.cols());
      for (Eigen::Index i = 0; i < x.rows(); ++i) d(i, i) = g(i, 0);
      add_grad(n.a, d);
      break;
    }
    case Primitive::kSum: {
      const RMat& x = in(n.a).val();
      add_grad_expr(n.a, RMat::Constant(x.rows(), x.cols(), g(0, 0)));
      break;
    }
    case Primitive::kMinEntry: {
      const RMat& x = in(n.a).val();
      RMat d = RMat::Zero(x.rows(), x.cols());
      d.data()[n.arg] = g(0, 0);
      add_grad(n.a, d);
      break;
    }
    case Primitive::kColSlice: {
      const RMat& x = in(n.a).val();
      RMat d = RMat::Zero(x.rows(), x.cols());
      d.middleCols(static_cast<Eigen::Index>(n.attr), g.cols()) = g;
      add_grad(n.a, d);
      break;
    }
    default:
      throw InvalidArgument("tape: no adjoint for primitive");
  }
}

RMat Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.has_grad) return n.grad;
  return RMat::Zero(n.val().rows(), n.val().cols());
}

void Tape::accumulate_grad(Var v, RMat& dst, double weight) const {
  const Node& n = node(v);
  if (!n.has_grad) return;
  if (dst.rows() != n.grad.rows() || dst.cols() != n.grad.cols()) {
    throw ShapeError("accumulate_grad: destination " + shape_str(dst) + " vs " +
                     shape_str(n.grad));
  }
  if (weight == 1.0) {
    dst += n.grad;
  } else {
    dst += weight * n.grad;
  }
}

RMat Tape::grad_for(const RMat& p) const {
  RMat out = RMat::Zero(p.rows(), p.cols());
  for (const Node& n : nodes_) {
    if (n.op == Primitive::kLeaf && n.ref == &p && n.has_grad) out += n.grad;
  }
  return out;
}

std::uint64_t Tape::branch_signature() const {
  std::uint64_t h = 0x5eed;
  for (const Node& n : nodes_) {
    switch (n.op) {
      case Primitive::kRelu:
      case Primitive::kMaxZero:
      case Primitive::kAbs: {
        const RMat& x = nodes_[static_cast<std::size_t>(n.a)].val();
        std::uint64_t word = 0;
        int bits = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double v = x.data()[i];
          const std::uint64_t code = v > 0.0 ? 2 : (v < 0.0 ? 1 : 0);
          word = (word << 2) | code;
          if (++bits == 32) {
            h = hash_combine(h, word);
            word = 0;
            bits = 0;
          }
        }
        h = hash_combine(h, word);
        break;
      }
      case Primitive::kMinEntry:
        h = hash_combine(h, static_cast<std::uint64_t>(n.arg) + 1);
        break;
      default:
        break;
    }
  }
  return h;
}

double eval_with_grad(const TracedFn& f, std::span<RMat* const> params,
                      std::vector<RMat>& grads) {
  Tape tape;
  const Var out = f(tape);
  const double value = tape.scalar(out);
  tape.backward(out);
  grads.clear();
  grads.reserve(params.size());
  for (RMat* p : params) grads.push_back(tape.grad_for(*p));
  return value;
}

namespace {

struct Probe {
  double value;
  std::uint64_t signature;
};

Probe probe(const TracedFn& f) {
  Tape tape;
  const Var out = f(tape);
  return {tape.scalar(out), tape.branch_signature()};
}

}  // namespace

FdReport finite_diff_check(const TracedFn& f, std::span<RMat* const> params,
                           const FdOptions& opts) {
  std::vector<RMat> analytic;
  std::uint64_t base_sig = 0;
  {
    Tape tape;
    const Var out = f(tape);
    base_sig = tape.branch_signature();
    tape.backward(out);
    for (RMat* p : params) analytic.push_back(tape.grad_for(*p));
  }

  FdReport report;
  for (std::size_t t = 0; t < params.size(); ++t) {
    RMat& p = *params[t];
    Eigen::Index n = p.size();
    Eigen::Index stride = 1;
    if (opts.max_per_tensor > 0 && static_cast<std::size_t>(n) > opts.max_per_tensor) {
      stride = n / static_cast<Eigen::Index>(opts.max_per_tensor);
    }
    for (Eigen::Index i = 0; i < n; i += stride) {
      const double orig = p.data()[i];
      p.data()[i] = orig + opts.step;
      const Probe plus = probe(f);
      p.data()[i] = orig - opts.step;
      const Probe minus = probe(f);
      p.data()[i] = orig;
      if (plus.signature != base_sig || minus.signature != base_sig) {
        ++report.excluded;
        continue;
      }
      const double numeric = (plus.value - minus.value) / (2.0 * opts.step);
      const double a = analytic[t].data()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.abs_floor});
      const double rel = std::abs(a - numeric) / denom;
      ++report.checked;
      if (rel > opts.tolerance) ++report.failures;
      report.max_rel_error = std::max(report.max_rel_error, rel);
      report.worst.push_back({t, i, a, numeric, rel});
      std::sort(report.worst.begin(), report.worst.end(),
                [](const FdReport::Entry& x, const FdReport::Entry& y) {
                  return x.rel_error > y.rel_error;
                });
      if (report.worst.size() > 8) report.worst.pop_back();
    }
  }
  report.passed = report.failures == 0;
  return report;
}

}  // namespace isacnet::ad
