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

// One batch gradient plus Adam step, fused versus per-sample tracing.

#include <benchmark/benchmark.h>

#include <vector>

#include "isacnet/training.hpp"

namespace {

using namespace isacnet;

struct Fixture {
  SceneConfig sc;
  SoundingConfig so;
  Hyperparams hp;
  NetParams p;
  std::vector<TrainingSample> batch;

  explicit Fixture(int d) {
    hp.d = d;
    hp.calibration_samples = 16;
    p = initial_params(sc, so, hp, 1);
    RngStream rng(3, 0);
    for (int i = 0; i < hp.batch_size; ++i) batch.push_back(draw_sample(sc, so, rng));
  }
};

void BM_BatchGradFused(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  GradBundle g = GradBundle::zeros_like(f.p);
  for (auto _ : state) {
    g.set_zero();
    benchmark::DoNotOptimize(
        accumulate_batch_grad(f.p, f.batch, f.hp, f.sc.sigma2_watts(), g).data());
  }
}
BENCHMARK(BM_BatchGradFused)->Arg(256)->Arg(1024)->ArgName("d")->Unit(benchmark::kMillisecond);

void BM_BatchGradPerSample(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  GradBundle g = GradBundle::zeros_like(f.p);
  const double w = 1.0 / static_cast<double>(f.batch.size());
  for (auto _ : state) {
    g.set_zero();
    for (const TrainingSample& s : f.batch) {
      benchmark::DoNotOptimize(accumulate_sample_grad(f.p, s, f.hp, f.sc.sigma2_watts(), w, g));
    }
  }
}
BENCHMARK(BM_BatchGradPerSample)->Arg(256)->ArgName("d")->Unit(benchmark::kMillisecond);

void BM_AdamStep(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  TrainState ts(f.p);
  GradBundle g = GradBundle::zeros_like(f.p);
  accumulate_batch_grad(f.p, f.batch, f.hp, f.sc.sigma2_watts(), g);
  for (auto _ : state) {
    adam_step(ts, g, 1e-4);
  }
}
BENCHMARK(BM_AdamStep)->Arg(1024)->ArgName("d")->Unit(benchmark::kMillisecond);

}  // namespace
