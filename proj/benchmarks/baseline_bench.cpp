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

// Classical pipeline: channel estimation and the penalty-gradient optimizer.

#include <benchmark/benchmark.h>

#include "isacnet/baselines.hpp"
#include "isacnet/training.hpp"

namespace {

using namespace isacnet;

void BM_EstimateChannels(benchmark::State& state) {
  SceneConfig sc;
  SoundingConfig so;
  RngStream rng(4, 0);
  const TrainingSample s = draw_sample(sc, so, rng);
  const AngleGrid grid = AngleGrid::uniform();
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_channels(s.data, so, sc.K, sc.T, grid).H.data());
  }
}
BENCHMARK(BM_EstimateChannels)->Unit(benchmark::kMicrosecond);

void BM_OptimizePrecoder(benchmark::State& state) {
  SceneConfig sc;
  sc.K = static_cast<int>(state.range(0));
  SoundingConfig so;
  so.L_p = std::max(so.L_p, sc.K);
  RngStream rng(5, 0);
  const TrainingSample s = draw_sample(sc, so, rng);
  std::vector<CVec> g;
  for (const Target& t : s.scene.targets) g.push_back(t.g);
  OptimizerOptions o;
  o.restarts = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        optimize_precoder(s.scene.H, g, 5.0, 1.0, sc.sigma2_watts(), o).q);
  }
}
BENCHMARK(BM_OptimizePrecoder)->Arg(2)->Arg(4)->ArgName("K")->Unit(benchmark::kMillisecond);

}  // namespace
