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

#ifndef DPGM_RANDOM_H_
#define DPGM_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace dpgm {

// All randomness in the library flows through explicitly passed engines.
using Rng = std::mt19937_64;

// Derives independent, named child seeds from one master seed so that each
// randomized component can be re-run in isolation.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master() const { return master_; }
  std::uint64_t ChildSeed(std::string_view name) const;
  Rng Stream(std::string_view name) const { return Rng(ChildSeed(name)); }

 private:
  std::uint64_t master_;
};

// Stream names used by the training pipeline.
inline constexpr std::string_view kFeatureMapStream = "feature-map";
inline constexpr std::string_view kKMeansInitStream = "kmeans-init";
inline constexpr std::string_view kKMeansNoiseStream = "kmeans-noise";
inline constexpr std::string_view kModelInitStream = "model-init";
inline constexpr std::string_view kSgdSelectionStream = "sgd-selection";
inline constexpr std::string_view kSgdSamplingStream = "sgd-sampling";
inline constexpr std::string_view kSgdNoiseStream = "sgd-noise";
inline constexpr std::string_view kChainsStream = "chains";
inline constexpr std::string_view kGenerationStream = "generation";
inline constexpr std::string_view kWorkloadStream = "workload";

// Draws N(0, stddev^2). A zero standard deviation yields exactly zero and
// consumes no randomness.
double GaussianNoise(Rng& rng, double stddev);

// Uniform on [0, 1).
double Uniform01(Rng& rng);

}  // namespace dpgm

#endif  // DPGM_RANDOM_H_
