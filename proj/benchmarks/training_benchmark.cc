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

#include <vector>

#include "benchmark/benchmark.h"
#include "dpgm/data.h"
#include "dpgm/dp_sgd.h"
#include "dpgm/random.h"
#include "dpgm/rbm.h"

namespace dpgm {
namespace {

BinaryDataset RandomDataset(int n, int m, Rng& rng) {
  std::bernoulli_distribution bit(0.2);
  std::vector<BinaryRecord> records;
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint8_t> bits(m);
    for (auto& b : bits) b = bit(rng);
    bits[0] = 1;
    records.emplace_back(std::move(bits));
  }
  return BinaryDataset(m, std::move(records));
}

void BM_PcdGradients(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  Rng rng(1);
  const BinaryDataset data = RandomDataset(100, 784, rng);
  Batch batch;
  for (std::size_t i = 0; i < data.size(); ++i) {
    batch.indices.push_back(i);
    batch.records.push_back(data[i]);
  }
  const RbmModel model = RandomRbm(784, hidden, 0.01, rng);
  PersistentChains chains(100, 784, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        PcdPerExampleGradients(model, batch, chains, 1).data());
  }
}
BENCHMARK(BM_PcdGradients)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_DpSgdStep(benchmark::State& state) {
  Rng rng(2);
  const BinaryDataset data = RandomDataset(6000, 784, rng);
  RbmTrainer trainer(RandomRbm(784, 200, 0.01, rng),
                     PersistentChains(100, 784, 4), 1);
  SgdConfig config;
  SgdState sgd_state = SgdState::Initial(config);
  Rng sampling(5), noise(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        DpSgdStep(trainer, data, config, sgd_state, sampling, noise));
  }
}
BENCHMARK(BM_DpSgdStep)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpgm
