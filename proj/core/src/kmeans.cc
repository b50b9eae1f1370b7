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

#include "dpgm/kmeans.h"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "dpgm/clipping.h"
#include "dpgm/errors.h"

namespace dpgm {

std::vector<int> AssignToNearest(const Eigen::MatrixXd& features,
                                 const Eigen::MatrixXd& centers) {
  if (features.cols() != centers.cols()) {
    throw DomainError("features and centers differ in dimension");
  }
  const Eigen::VectorXd center_sq = centers.rowwise().squaredNorm();
  // ||x - c||^2 = ||x||^2 - 2 <x, c> + ||c||^2; ||x||^2 is constant per row.
  const Eigen::MatrixXd cross = features * centers.transpose();
  std::vector<int> assignments(features.rows());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double value = center_sq[c] - 2.0 * cross(i, c);
      if (value < best_value) {
        best_value = value;
        best = static_cast<int>(c);
      }
    }
    assignments[i] = best;
  }
  return assignments;
}

ClusterSums AccumulateClusters(const Eigen::MatrixXd& features,
                               const std::vector<int>& assignments, int k) {
  ClusterSums out;
  out.sizes.assign(k, 0);
  out.sums = Eigen::MatrixXd::Zero(k, features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const int c = assignments[i];
    ++out.sizes[c];
    out.sums.row(c) += features.row(i);
  }
  return out;
}

double LloydObjective(const Eigen::MatrixXd& features,
                      const Eigen::MatrixXd& centers,
                      const std::vector<int>& assignments) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    total += (features.row(i) - centers.row(assignments[i])).squaredNorm();
  }
  return total;
}

Eigen::MatrixXd PublicInitialCenters(int k, int d, double scale,
                                     std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd centers(k, d);
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < d; ++j) centers(c, j) = normal(rng);
    centers.row(c) *= scale / centers.row(c).norm();
  }
  return centers;
}

Eigen::MatrixXd PublicRecordCenters(const FeatureMap& map, int k,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  const int m = map.input_dimension();
  Eigen::MatrixXd centers(k, map.feature_dimension());
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd record(m);
    for (int j = 0; j < m; ++j) record[j] = coin(rng) ? 1.0 : 0.0;
    centers.row(c) = Embed(map, record).transpose();
  }
  return centers;
}

Clustering DpKernelKMeansOnFeatures(const Eigen::MatrixXd& features,
                                    const KMeansConfig& config,
                                    const std::optional<Eigen::MatrixXd>& init,
                                    Rng& rng) {
  const int k = config.k;
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (k < 1) throw DomainError("k must be at least 1");
  if (config.iterations < 1) throw DomainError("k-means needs T >= 1");
  if (k > n) {
    throw DomainError("k = " + std::to_string(k) + " exceeds record count " +
                      std::to_string(n));
  }
  if (config.sigma_c < 0.0 || config.sigma_k < 0.0) {
    throw DomainError("noise scales must be non-negative");
  }

  Clustering out;
  out.k = k;
  out.iterations = config.iterations;
  out.clip_bound = config.rbf_mode ? 1.0
                                   : DpNormOfRows(features, config.sigma_c,
                                                  config.norm, rng);

  Eigen::MatrixXd clipped = features;
  ClipRowsInPlace(clipped, out.clip_bound);

  Eigen::MatrixXd centers;
  if (init) {
    if (init->rows() != k || init->cols() != d) {
      throw DomainError("initial centers must be k x d");
    }
    centers = *init;
  } else {
    centers = PublicInitialCenters(k, static_cast<int>(d), out.clip_bound,
                                   config.init_seed);
  }

  // Sizes have L2 sensitivity sqrt(2); feature sums sqrt(2) C_s.
  const double size_stddev = std::numbers::sqrt2 * config.sigma_k;
  const double sum_stddev = size_stddev * out.clip_bound;
  std::vector<double> noisy_sizes(k, 0.0);
  for (int t = 0; t < config.iterations; ++t) {
    const std::vector<int> assignments = AssignToNearest(clipped, centers);
    const ClusterSums sums = AccumulateClusters(clipped, assignments, k);
    for (int c = 0; c < k; ++c) {
      const double noisy_size =
          static_cast<double>(sums.sizes[c]) + GaussianNoise(rng, size_stddev);
      Eigen::VectorXd noisy_sum = sums.sums.row(c).transpose();
      for (Eigen::Index j = 0; j < d; ++j) {
        noisy_sum[j] += GaussianNoise(rng, sum_stddev);
      }
      noisy_sizes[c] = noisy_size;
      // A noisy size below one gives no usable center; keep the previous
      // (already released) one. The branch reads only released values.
      if (noisy_size >= 1.0) {
        centers.row(c) = noisy_sum.transpose() / noisy_size;
      }
    }
    out.size_trace.push_back(noisy_sizes);
  }

  out.noisy_centers = centers;
  out.noisy_sizes = noisy_sizes;
  out.assignments = AssignToNearest(clipped, centers);
  return out;
}

Clustering DpKernelKMeans(const BinaryDataset& dataset, const FeatureMap& map,
                          const KMeansConfig& config,
                          const std::optional<Eigen::MatrixXd>& init,
                          Rng& rng) {
  if (static_cast<std::size_t>(std::max(config.k, 0)) > dataset.size()) {
    throw DomainError("k = " + std::to_string(config.k) +
                      " exceeds record count " +
                      std::to_string(dataset.size()));
  }
  const Eigen::MatrixXd features = EmbedAll(map, dataset);
  if (init) return DpKernelKMeansOnFeatures(features, config, init, rng);
  return DpKernelKMeansOnFeatures(
      features, config, PublicRecordCenters(map, config.k, config.init_seed),
      rng);
}

nlohmann::json ClusteringSummaryJson(const Clustering& clustering,
                                     const KMeansConfig& config) {
  return {
      {"k", clustering.k},
      {"iterations", clustering.iterations},
      {"sigma_k", config.sigma_k},
      {"sigma_c", config.sigma_c},
      {"rbf_mode", config.rbf_mode},
      {"clip_bound", clustering.clip_bound},
      {"noisy_sizes_per_iteration", clustering.size_trace},
  };
}

}  // namespace dpgm
