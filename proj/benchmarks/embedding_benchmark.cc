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
#include "dpgm/random.h"
#include "dpgm/rff.h"

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

void BM_EmbedAll(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  const BinaryDataset data = RandomDataset(1000, 784, rng);
  const FeatureMap map = FeatureMapFromSeed(784, d, 1.0 / 784, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(EmbedAll(map, data).data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_EmbedAll)->Arg(128)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpgm
