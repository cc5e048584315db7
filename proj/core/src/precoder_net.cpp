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

#include "isacnet/precoder_net.hpp"

#include <array>
#include <cmath>

#include "isacnet/errors.hpp"

namespace isacnet {

void NetParams::validate() const {
  if (M < 1 || d < 1) throw ShapeError("NetParams: M and d must be positive");
  comm.validate();
  sens.validate();
  isac.validate();
  const Eigen::Index two_m = 2 * M;
  if (comm.input_size() != two_m || sens.input_size() != two_m) {
    throw ShapeError("NetParams: comm/sens input size must be 2M");
  }
  if (comm.output_size() != d || sens.output_size() != d || isac.input_size() != d) {
    throw ShapeError("NetParams: comm/sens output and isac input must equal d");
  }
  if (isac.output_size() != two_m) throw ShapeError("NetParams: isac output size must be 2M");
  if (mu.cols() != 1) throw ShapeError("NetParams: mu must be a column");
}

NetParams init_params(int M, int K, int d, RngStream& rng) {
  if (M < 1 || K < 1 || d < 1) throw InvalidArgument("init_params: M, K, d must be positive");
  NetParams p;
  p.M = M;
  p.d = d;
  const std::array<int, 3> lift{2 * M, 2 * d, d};
  const std::array<int, 5> joint{d, d, d, 2 * d, 2 * M};
  p.comm = make_mlp(lift, Activation::kRelu, rng);
  p.sens = make_mlp(lift, Activation::kRelu, rng);
  p.isac = make_mlp(joint, Activation::kIdentity, rng);
  p.mu = RMat::Ones(K, 1);
  return p;
}

std::size_t param_count(const NetParams& p) {
  return p.comm.param_count() + p.sens.param_count() + p.isac.param_count();
}

std::size_t trainable_count(const NetParams& p) {
  return param_count(p) + static_cast<std::size_t>(p.mu.size());
}

namespace {

template <typename P, typename F>
void visit(P& p, const F& fn) {
  auto mlp = [&](auto& m, const char* name) {
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
      const std::string base = std::string(name) + "." + std::to_string(i);
      fn(base + ".weight", m.layers[i].weight);
      fn(base + ".bias", m.layers[i].bias);
    }
  };
  mlp(p.comm, "comm");
  mlp(p.sens, "sens");
  mlp(p.isac, "isac");
  fn(std::string("mu"), p.mu);
}

}  // namespace

void for_each_tensor(NetParams& p, const std::function<void(const std::string&, RMat&)>& fn) {
  visit(p, fn);
}

void for_each_tensor(const NetParams& p,
                     const std::function<void(const std::string&, const RMat&)>& fn) {
  visit(p, fn);
}

GradBundle GradBundle::zeros_like(const NetParams& p) {
  GradBundle g{p};
  g.set_zero();
  return g;
}

void GradBundle::set_zero() {
  for_each_tensor(values, [](const std::string&, RMat& t) { t.setZero(); });
}

GradBundle& GradBundle::operator+=(const GradBundle& o) {
  std::vector<const RMat*> rhs;
  for_each_tensor(o.values, [&](const std::string&, const RMat& t) { rhs.push_back(&t); });
  std::size_t i = 0;
  for_each_tensor(values, [&](const std::string& name, RMat& t) {
    const RMat& r = *rhs.at(i++);
    if (r.rows() != t.rows() || r.cols() != t.cols()) {
      throw ShapeError("GradBundle: shape mismatch in " + name);
    }
    t += r;
  });
  return *this;
}

GradBundle& GradBundle::operator*=(double s) {
  for_each_tensor(values, [s](const std::string&, RMat& t) { t *= s; });
  return *this;
}

double GradBundle::squared_norm() const {
  double acc = 0.0;
  for_each_tensor(values, [&](const std::string&, const RMat& t) { acc += t.squaredNorm(); });
  return acc;
}

RMat precode_raw(const NetParams& p, const SoundingData& data) {
  if (data.Y.rows() != p.M || data.Z.rows() != p.M || data.Z.cols() != p.M) {
    throw ShapeError("precode: sounding data must be M x K and M x M for M=" +
                     std::to_string(p.M));
  }
  const RMat y = p.scaling.pilots * c2r_stack(data.Y);
  const RMat z = p.scaling.echoes * c2r_stack(data.Z);
  const RMat lifted_y = mlp_forward_columns(p.comm, y);
  const RMat lifted_z = mlp_forward_columns(p.sens, z);
  RMat joint(p.d, lifted_y.cols() + lifted_z.cols());
  joint << lifted_y, lifted_z;
  return mlp_forward_columns(p.isac, joint);
}

Precoder precode(const NetParams& p, const SoundingData& data, double pd_watts) {
  const RMat raw = precode_raw(p, data);
  return Precoder::normalized(r2c_merge(raw), pd_watts, static_cast<int>(data.Y.cols()));
}

NetVars bind_params(ad::Tape& tape, const NetParams& p) {
  NetVars v;
  auto bind = [&](const MlpParams& m, std::vector<NetVars::LayerVars>& out) {
    for (const Layer& l : m.layers) {
      out.push_back({tape.parameter(l.weight), tape.parameter(l.bias), l.activation});
    }
  };
  bind(p.comm, v.comm);
  bind(p.sens, v.sens);
  bind(p.isac, v.isac);
  v.mu = tape.parameter(p.mu);
  return v;
}

NetVars bind_params(ad::Tape& tape, const NetParams& p, NetParams& sinks, double weight,
                    double mu_weight) {
  NetVars v;
  auto bind = [&](const MlpParams& m, MlpParams& s, std::vector<NetVars::LayerVars>& out) {
    if (s.layers.size() != m.layers.size()) throw ShapeError("bind_params: sink layout differs");
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
      const Layer& l = m.layers[i];
      out.push_back({tape.parameter(l.weight, &s.layers[i].weight, weight),
                     tape.parameter(l.bias, &s.layers[i].bias, weight), l.activation});
    }
  };
  bind(p.comm, sinks.comm, v.comm);
  bind(p.sens, sinks.sens, v.sens);
  bind(p.isac, sinks.isac, v.isac);
  v.mu = tape.parameter(p.mu, &sinks.mu, mu_weight);
  return v;
}

namespace {

ad::Var trace_mlp(ad::Tape& tape, const std::vector<NetVars::LayerVars>& layers, ad::Var x) {
  for (const auto& l : layers) {
    x = tape.affine(l.weight, x, l.bias);
    if (l.activation == Activation::kRelu) x = tape.relu(x);
  }
  return x;
}

}  // namespace

ad::Var trace_precoder(ad::Tape& tape, const NetVars& vars, const NetParams& p,
                       const SoundingData& data, double pd_watts, double norm_eps) {
  if (data.Y.rows() != p.M || data.Z.rows() != p.M || data.Z.cols() != p.M) {
    throw ShapeError("trace_precoder: sounding data shape mismatch");
  }
  const ad::Var y = tape.constant(p.scaling.pilots * c2r_stack(data.Y));
  const ad::Var z = tape.constant(p.scaling.echoes * c2r_stack(data.Z));
  const ad::Var ly = trace_mlp(tape, vars.comm, y);
  const ad::Var lz = trace_mlp(tape, vars.sens, z);
  const ad::Var raw = trace_mlp(tape, vars.isac, tape.hconcat(ly, lz));
  return tape.frob_normalize(raw, pd_watts, norm_eps);
}

}  // namespace isacnet
