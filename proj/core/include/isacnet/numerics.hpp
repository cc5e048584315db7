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

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace isacnet {

using cdouble = std::complex<double>;

/// Dense complex matrix, row-major. Carries channels, precoders and received signals.
using CMat = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::Matrix<cdouble, Eigen::Dynamic, 1>;

/// Real matrices used by the network. Column-major so that a column is one sample vector.
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

class RngStream;

/// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(const CMat& x, const char* what);
void require_finite(const RMat& x, const char* what);

/// i.i.d. circularly-symmetric complex Gaussian entries with E|x|^2 = variance.
CMat sample_cgauss(RngStream& rng, Eigen::Index rows, Eigen::Index cols, double variance);

/// Column n of the result is [Re(x_n); Im(x_n)].
RMat c2r_stack(const CMat& x);

/// Inverse of c2r_stack: top half + j * bottom half. Throws ShapeError on odd row count.
CMat r2c_merge(const RMat& x);

double frob_norm(const CMat& x);

/// Real "lift" of the row-vector map w -> u^H w. For a complex matrix A (R x N) whose
/// rows are a_r^H, returns the 2R x 2N real matrix L with
///   L * [Re w; Im w] = [Re(a_1^H w); Im(a_1^H w); Re(a_2^H w); ...]
/// i.e. rows 2r and 2r+1 carry the real and imaginary parts of row r's product.
RMat lift_rows(const CMat& a);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }

}  // namespace isacnet
