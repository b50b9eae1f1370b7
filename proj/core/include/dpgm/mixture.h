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

// Differentially private mixture of generative models.
//
// Training partitions the data with private kernel k-means, then trains one
// RBM per cluster with interleaved DP-SGD steps: each step picks cluster s
// with probability |D_s| / |D| and samples its batch with q_s = L / |D_s|,
// so every record is included with probability L / |D| per step. The
// released model holds only DP outputs: noisy centers, noisy cluster sizes
// (the generation weights), the noisily trained parameters and the public
// feature map.

#ifndef DPGM_MIXTURE_H_
#define DPGM_MIXTURE_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpgm/accountant.h"
#include "dpgm/data.h"
#include "dpgm/dp_norm.h"
#include "dpgm/kmeans.h"
#include "dpgm/rbm.h"
#include "dpgm/rff.h"

namespace dpgm {

inline constexpr int kModelFileVersion = 1;

struct DpgmConfig {
  int k = 10;
  int feature_dimension = kDefaultFeatureDimension;
  // Kernel width; 0 selects 1/m.
  double gamma = 0.0;
  int kmeans_iterations = 20;
  double sigma_c = 4.0;
  double sigma_k = 40.0;
  double sigma_g = 1.0;
  bool rbf_mode = true;
  int batch_size = 100;  // L
  double epochs = 20.0;
  double learning_rate = 0.01;
  int hidden_units = kDefaultHiddenUnits;
  int gibbs_steps = 1;
  double weight_stddev = kDefaultWeightStddev;
  DpNormOptions norm;
  // Defaults to 1 / |D|.
  std::optional<double> delta;
  int lambda_max = 32;
  bool strict_gaussian = false;
  std::vector<SplitPair> j_grid = DefaultSplitGrid();
  // Permits zero noise scales; never set outside tests.
  bool allow_zero_noise = false;
  // k public centers in feature space.
  std::optional<Eigen::MatrixXd> initial_centers;
  std::uint64_t seed = 0;

  // Throws DomainError.
  void Validate() const;
  double ResolvedGamma(int m) const { return gamma > 0.0 ? gamma : 1.0 / m; }
  // The accounting for a run on `dataset_size` records.
  PrivacyConfig Privacy(std::size_t dataset_size) const;
};

nlohmann::json ToJson(const DpgmConfig& config);

struct MixtureModel {
  int m = 0;
  int k = 0;
  FeatureMap feature_map;
  Eigen::MatrixXd centers;      // k x d, noisy
  std::vector<double> weights;  // noisy cluster sizes clamped at 0
  std::vector<RbmModel> models;
  PrivacyConfig privacy;
  EpsilonResult epsilon;
  nlohmann::json config_echo;
};

struct Partition {
  FeatureMap feature_map;
  KMeansConfig kmeans;
  Clustering clustering;
};

// The first training stage on its own: the public feature map followed by
// private kernel k-means, with the seeds TrainDpgm uses.
Partition PartitionDataset(const BinaryDataset& dataset,
                           const DpgmConfig& config);

using LogSink = std::function<void(const nlohmann::json&)>;

// Index drawn with probability proportional to `weights`. Throws DomainError
// when no weight is positive.
int SelectWeighted(std::span<const double> weights, Rng& rng);

MixtureModel TrainDpgm(const BinaryDataset& dataset, const DpgmConfig& config,
                       const LogSink& log = {});

// Each record comes from model i with probability weights_i / sum(weights).
// Synthetic records may be empty.
BinaryDataset GenerateSynthetic(const MixtureModel& mixture, std::size_t count,
                                int gibbs_steps, Rng& rng);

nlohmann::json ToJson(const MixtureModel& mixture);
MixtureModel MixtureFromJson(const nlohmann::json& j);

}  // namespace dpgm

#endif  // DPGM_MIXTURE_H_
