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

// Random Fourier features for the Gaussian RBF kernel
// k(x, y) = exp(-gamma ||x - y||^2).
//
// z(x) = sqrt(2/d) [cos(<w_1, x> + b_1), ..., cos(<w_d, x> + b_d)] with
// w_i ~ N(0, 2 gamma I) and b_i ~ U[0, 2 pi), so that E[<z(x), z(y)>] =
// k(x, y). The map is data-independent, so drawing it costs no privacy, and
// E ||z(x)||_2 <= 1 for every x, which lets clustering use the a priori
// clipping bound 1.

#ifndef DPGM_RFF_H_
#define DPGM_RFF_H_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "dpgm/data.h"
#include "dpgm/random.h"

namespace dpgm {

inline constexpr int kDefaultFeatureDimension = 200;

struct FeatureMap {
  Eigen::MatrixXd w;  // d x m frequencies
  Eigen::VectorXd b;  // d phases
  double gamma = 1.0;
  // Seed of the stream the map was drawn from, when known. Together with
  // (m, d, gamma) it reproduces the map exactly.
  std::optional<std::uint64_t> seed;

  int input_dimension() const { return static_cast<int>(w.cols()); }
  int feature_dimension() const { return static_cast<int>(w.rows()); }
};

FeatureMap SampleFeatureMap(int m, int d, double gamma, Rng& rng);
FeatureMap FeatureMapFromSeed(int m, int d, double gamma, std::uint64_t seed);

// Throws DomainError on a dimension mismatch.
Eigen::VectorXd Embed(const FeatureMap& map, const Eigen::VectorXd& x);
Eigen::VectorXd Embed(const FeatureMap& map, const BinaryRecord& x);
// Row i is the embedding of record i.
Eigen::MatrixXd EmbedAll(const FeatureMap& map, const BinaryDataset& dataset);

double KernelRbf(const BinaryRecord& x, const BinaryRecord& y, double gamma);

}  // namespace dpgm

#endif  // DPGM_RFF_H_
