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

#include "isacnet/numerics.hpp"

#include <string>

#include "isacnet/errors.hpp"
#include "isacnet/rng.hpp"

namespace isacnet {

void require_finite(const CMat& x, const char* what) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const cdouble v = x.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument(std::string(what) + ": non-finite entry");
    }
  }
}

void require_finite(const RMat& x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entry");
}

CMat sample_cgauss(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double variance) {
  if (!(variance > 0.0)) {
    throw InvalidArgument("sample_cgauss: variance must be positive, got " +
                          std::to_string(variance));
  }
  if (rows < 0 || cols < 0) throw InvalidArgument("sample_cgauss: negative dimension");
  CMat out(rows, cols);
  for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] = rng.cgauss(variance);
  return out;
}

RMat c2r_stack(const CMat& x) {
  const Eigen::Index m = x.rows();
  RMat out(2 * m, x.cols());
  out.topRows(m) = x.real();
  out.bottomRows(m) = x.imag();
  return out;
}

CMat r2c_merge(const RMat& x) {
  if (x.rows() % 2 != 0) {
    throw ShapeError("r2c_merge: row count " + std::to_string(x.rows()) + " is odd");
  }
  const Eigen::Index m = x.rows() / 2;
  CMat out(m, x.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = cdouble(x(i, j), x(i + m, j));
  }
  return out;
}

double frob_norm(const CMat& x) { return x.norm(); }

RMat lift_rows(const CMat& a) {
  // Row entry re + j im times wr + j wi:  real = re.wr - im.wi,  imag = re.wi + im.wr
  const Eigen::Index r = a.rows();
  const Eigen::Index n = a.cols();
  RMat out(2 * r, 2 * n);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double re = a(i, j).real();
      const double im = a(i, j).imag();
      out(2 * i, j) = re;
      out(2 * i, j + n) = -im;
      out(2 * i + 1, j) = im;
      out(2 * i + 1, j + n) = re;
    }
  }
  return out;
}

}  // namespace isacnet
