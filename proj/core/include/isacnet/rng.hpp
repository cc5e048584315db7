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

#include <complex>
#include <cstdint>
#include <random>

namespace isacnet {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is a 64-bit Mersenne twister initialized from a seed_seq over the four
/// 32-bit halves of (seed, stream). Distinct stream ids give decorrelated engines, so a
/// batch can hand stream id = sample index to each worker and stay bit-reproducible
/// regardless of thread count. Instances are single-owner.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Child stream whose id mixes this stream's id with `child`.
  RngStream split(std::uint64_t child) const;

  double uniform(double lo, double hi);
  double normal();
  /// CN(0, variance): real and imaginary parts each N(0, variance/2).
  std::complex<double> cgauss(double variance);
  /// Uniform phase on [0, 2pi).
  double phase();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// SplitMix64 finalizer; used to derive stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace isacnet
