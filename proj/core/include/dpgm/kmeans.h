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

// Differentially private kernel k-means: Lloyd iterations over clipped
// random Fourier features where every iteration releases Gaussian-noised
// cluster sizes and feature sums.

#ifndef DPGM_KMEANS_H_
#define DPGM_KMEANS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "dpgm/data.h"
#include "dpgm/dp_norm.h"
#include "dpgm/random.h"
#include "dpgm/rff.h"

namespace dpgm {

struct KMeansConfig {
  int k = 10;
  int iterations = 20;
  double sigma_c = 4.0;
  double sigma_k = 40.0;
  // With RBF features every embedding has expected norm at most 1, so the
  // clipping bound is fixed to 1 and no norm selection is run.
  bool rbf_mode = true;
  DpNormOptions norm;
  // Public seed for the default initial centers.
  std::uint64_t init_seed = 0;
};

struct Clustering {
  int k = 0;
  int iterations = 0;
  double clip_bound = 0.0;
  // Final partition: nearest noisy center for every record. Never released.
  std::vector<int> assignments;
  Eigen::MatrixXd noisy_centers;                // k x d
  std::vector<double> noisy_sizes;              // last iteration
  std::vector<std::vector<double>> size_trace;  // per iteration
};

// Row-wise nearest center in Euclidean distance; ties go to the smaller
// index.
std::vector<int> AssignToNearest(const Eigen::MatrixXd& features,
                                 const Eigen::MatrixXd& centers);

struct ClusterSums {
  std::vector<std::int64_t> sizes;
  Eigen::MatrixXd sums;  // k x d
};

ClusterSums AccumulateClusters(const Eigen::MatrixXd& features,
                               const std::vector<int>& assignments, int k);

// Sum over records of the squared distance to the assigned center.
double LloydObjective(const Eigen::MatrixXd& features,
                      const Eigen::MatrixXd& centers,
                      const std::vector<int>& assignments);

// k pseudo-random unit vectors in R^d scaled to `scale`, drawn from a public
// seed only.
Eigen::MatrixXd PublicInitialCenters(int k, int d, double scale,
                                     std::uint64_t seed);

// Runs the private iterations on precomputed features (rows). `init` holds k
// public centers; when absent, PublicInitialCenters(config.init_seed) is
// used. sigma values of 0 disable the corresponding noise (tests only).
Clustering DpKernelKMeansOnFeatures(const Eigen::MatrixXd& features,
                                    const KMeansConfig& config,
                                    const std::optional<Eigen::MatrixXd>& init,
                                    Rng& rng);

// Embeddings of k pseudo-random Bernoulli(1/2) records, drawn from a public
// seed only.
Eigen::MatrixXd PublicRecordCenters(const FeatureMap& map, int k,
                                    std::uint64_t seed);

// As above on EmbedAll(map, dataset). When `init` is absent,
// PublicRecordCenters(map, config.k, config.init_seed) is used.
Clustering DpKernelKMeans(const BinaryDataset& dataset, const FeatureMap& map,
                          const KMeansConfig& config,
                          const std::optional<Eigen::MatrixXd>& init, Rng& rng);

// DP-released summary only (no assignments).
nlohmann::json ClusteringSummaryJson(const Clustering& clustering,
                                     const KMeansConfig& config);

}  // namespace dpgm

#endif  // DPGM_KMEANS_H_
