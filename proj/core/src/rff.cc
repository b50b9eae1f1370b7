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

#include "dpgm/rff.h"

#include <cmath>
#include <numbers>
#include <string>

#include "dpgm/errors.h"

namespace dpgm {

FeatureMap SampleFeatureMap(int m, int d, double gamma, Rng& rng) {
  if (m < 1 || d < 1) throw DomainError("feature map needs m, d >= 1");
  if (!(gamma > 0.0)) throw DomainError("kernel width gamma must be positive");
  FeatureMap map;
  map.gamma = gamma;
  map.w.resize(d, m);
  map.b.resize(d);
  std::normal_distribution<double> frequency(0.0, std::sqrt(2.0 * gamma));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) map.w(i, j) = frequency(rng);
    double b = phase(rng);
    // uniform_real_distribution may round up to the upper bound.
    if (b >= 2.0 * std::numbers::pi) b = 0.0;
    map.b[i] = b;
  }
  return map;
}

FeatureMap FeatureMapFromSeed(int m, int d, double gamma, std::uint64_t seed) {
  Rng rng(seed);
  FeatureMap map = SampleFeatureMap(m, d, gamma, rng);
  map.seed = seed;
  return map;
}

Eigen::VectorXd Embed(const FeatureMap& map, const Eigen::VectorXd& x) {
  if (x.size() != map.input_dimension()) {
    throw DomainError("record dimension " + std::to_string(x.size()) +
                      " does not match feature map input dimension " +
                      std::to_string(map.input_dimension()));
  }
  const double scale = std::sqrt(2.0 / map.feature_dimension());
  Eigen::VectorXd z = map.w * x + map.b;
  return scale * z.array().cos().matrix();
}

Eigen::VectorXd Embed(const FeatureMap& map, const BinaryRecord& x) {
  return Embed(map, x.ToVector());
}

Eigen::MatrixXd EmbedAll(const FeatureMap& map, const BinaryDataset& dataset) {
  if (dataset.dimension() != map.input_dimension()) {
    throw DomainError("dataset dimension does not match feature map");
  }
  const double scale = std::sqrt(2.0 / map.feature_dimension());
  Eigen::MatrixXd z = dataset.ToMatrix() * map.w.transpose();
  z.rowwise() += map.b.transpose();
  return scale * z.array().cos().matrix();
}

double KernelRbf(const BinaryRecord& x, const BinaryRecord& y, double gamma) {
  if (x.dimension() != y.dimension()) {
    throw DomainError("kernel arguments differ in dimension");
  }
  int squared_distance = 0;
  for (int j = 0; j < x.dimension(); ++j) squared_distance += x[j] != y[j];
  return std::exp(-gamma * squared_distance);
}

}  // namespace dpgm
