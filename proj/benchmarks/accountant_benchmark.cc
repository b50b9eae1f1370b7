//
// Copyright 2026 The DPGM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "benchmark/benchmark.h"
#include "dpgm/accountant.h"

namespace dpgm {
namespace {

void BM_AlphaSubsampledGaussian(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(AlphaSubsampledGaussian(lambda, 4.0, 0.0017));
  }
}
BENCHMARK(BM_AlphaSubsampledGaussian)->Arg(2)->Arg(32)->Arg(640);

void BM_EpsilonForDelta(benchmark::State& state) {
  PrivacyConfig config;
  config.q = 0.0017;
  config.t_k = 20;
  config.t_s = SgdIterationsForEpochs(20, config.q);
  config.delta = 1e-5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(EpsilonForDelta(config).epsilon);
  }
}
BENCHMARK(BM_EpsilonForDelta)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpgm
