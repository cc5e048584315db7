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

// Forward pass of the full-size network versus the number of users.

#include <benchmark/benchmark.h>

#include "isacnet/harness.hpp"
#include "isacnet/precoder_net.hpp"
#include "isacnet/training.hpp"

namespace {

using namespace isacnet;

void BM_Precode(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const int d = static_cast<int>(state.range(1));
  RngStream init(1, 0);
  const NetParams p = init_params(16, K, d, init);
  SceneConfig sc;
  sc.K = K;
  SoundingConfig so;
  so.L_p = std::max(so.L_p, K);
  RngStream rng(2, 0);
  const TrainingSample s = draw_sample(sc, so, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(precode(p, s.data, 1.0).W().data());
  }
  state.counters["flops"] = benchmark::Counter(inference_flops(p, K),
                                               benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Precode)
    ->ArgsProduct({{2, 4, 8, 16}, {256, 1024}})
    ->ArgNames({"K", "d"})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
