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

#include "dpgm/mixture.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpgm/dp_sgd.h"
#include "dpgm/errors.h"
#include "dpgm/kmeans.h"

namespace dpgm {
namespace {

// Runs `body` and re-throws library errors tagged with the stage name.
template <typename Body>
auto RunStage(const std::string& stage, Body&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

std::vector<double> RowToVector(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> out(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) out[c] = m(r, c);
  return out;
}

}  // namespace

void DpgmConfig::Validate() const {
  if (k < 1) throw DomainError("k must be at least 1");
  if (feature_dimension < 1) throw DomainError("d must be at least 1");
  if (gamma < 0.0) throw DomainError("gamma must be positive (or 0 for 1/m)");
  if (kmeans_iterations < 1) throw DomainError("T_K must be at least 1");
  if (batch_size < 1) throw DomainError("batch size L must be at least 1");
  if (epochs < 0.0) throw DomainError("epochs must be non-negative");
  if (!(learning_rate > 0.0)) throw DomainError("learning rate must be > 0");
  if (hidden_units < 1) throw DomainError("hidden units must be >= 1");
  if (gibbs_steps < 1) throw DomainError("gibbs steps must be >= 1");
  if (!(weight_stddev >= 0.0)) throw DomainError("weight stddev must be >= 0");
  if (norm.bins < 1 || !(norm.c_max > 0.0)) {
    throw DomainError("DPNorm needs c_max > 0 and w >= 1");
  }
  const bool positive = sigma_c > 0.0 && sigma_k > 0.0 && sigma_g > 0.0;
  const bool non_negative = sigma_c >= 0.0 && sigma_k >= 0.0 && sigma_g >= 0.0;
  if (!positive && !(allow_zero_noise && non_negative)) {
    throw DomainError(
        "noise scales must be positive; zero noise requires the explicit "
        "unsafe flag");
  }
  if (delta && !(*delta > 0.0 && *delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
}

PrivacyConfig DpgmConfig::Privacy(std::size_t dataset_size) const {
  if (dataset_size == 0) throw DomainError("empty dataset");
  PrivacyConfig privacy;
  privacy.sigma_c = sigma_c;
  privacy.sigma_k = sigma_k;
  privacy.sigma_g = sigma_g;
  privacy.q =
      static_cast<double>(batch_size) / static_cast<double>(dataset_size);
  if (privacy.q > 1.0) {
    throw DomainError("batch size L exceeds the dataset size");
  }
  privacy.t_k = kmeans_iterations;
  privacy.t_s = SgdIterationsForEpochs(epochs, privacy.q);
  privacy.delta = delta ? *delta : 1.0 / static_cast<double>(dataset_size);
  privacy.rbf_mode = rbf_mode;
  privacy.lambda_max = lambda_max;
  privacy.strict_gaussian = strict_gaussian;
  privacy.j_grid = j_grid;
  return privacy;
}

nlohmann::json ToJson(const DpgmConfig& config) {
  nlohmann::json splits = nlohmann::json::array();
  for (const auto& split : config.j_grid) splits.push_back(split.first);
  nlohmann::json out = {
      {"k", config.k},
      {"d", config.feature_dimension},
      {"gamma", config.gamma},
      {"kmeans_iterations", config.kmeans_iterations},
      {"sigma_c", config.sigma_c},
      {"sigma_k", config.sigma_k},
      {"sigma_g", config.sigma_g},
      {"rbf_mode", config.rbf_mode},
      {"batch_size", config.batch_size},
      {"epochs", config.epochs},
      {"learning_rate", config.learning_rate},
      {"hidden_units", config.hidden_units},
      {"gibbs_steps", config.gibbs_steps},
      {"weight_stddev", config.weight_stddev},
      {"c_max", config.norm.c_max},
      {"w", config.norm.bins},
      {"lambda_max", config.lambda_max},
      {"strict_gaussian", config.strict_gaussian},
      {"j_grid", splits},
      {"unsafe_no_privacy", config.allow_zero_noise},
      {"public_initial_centers", config.initial_centers.has_value()},
      {"seed", config.seed},
  };
  out["delta"] =
      config.delta ? nlohmann::json(*config.delta) : nlohmann::json(nullptr);
  return out;
}

int SelectWeighted(std::span<const double> weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw DomainError("selection weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw DomainError(
        "all mixture weights are zero; the model is degenerate (retrain "
        "with less clustering noise or fewer clusters)");
  }
  const double u = Uniform01(rng) * total;
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cumulative += weights[i];
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

Partition PartitionDataset(const BinaryDataset& dataset,
                           const DpgmConfig& config) {
  const int m = dataset.dimension();
  const SeedTree seeds(config.seed);
  Partition out;
  out.feature_map =
      FeatureMapFromSeed(m, config.feature_dimension, config.ResolvedGamma(m),
                         seeds.ChildSeed(kFeatureMapStream));
  out.kmeans.k = config.k;
  out.kmeans.iterations = config.kmeans_iterations;
  out.kmeans.sigma_c = config.sigma_c;
  out.kmeans.sigma_k = config.sigma_k;
  out.kmeans.rbf_mode = config.rbf_mode;
  out.kmeans.norm = config.norm;
  out.kmeans.init_seed = seeds.ChildSeed(kKMeansInitStream);
  Rng rng = seeds.Stream(kKMeansNoiseStream);
  out.clustering = DpKernelKMeans(dataset, out.feature_map, out.kmeans,
                                  config.initial_centers, rng);
  return out;
}

MixtureModel TrainDpgm(const BinaryDataset& dataset, const DpgmConfig& config,
                       const LogSink& log) {
  RunStage("config", [&] {
    config.Validate();
    if (dataset.empty()) throw DomainError("training data is empty");
    return 0;
  });
  const int m = dataset.dimension();
  const SeedTree seeds(config.seed);

  MixtureModel mixture;
  mixture.m = m;
  mixture.k = config.k;
  mixture.config_echo = ToJson(config);
  mixture.privacy = RunStage("accountant", [&] {
    PrivacyConfig privacy = config.Privacy(dataset.size());
    if (config.allow_zero_noise) return privacy;
    privacy.Validate();
    return privacy;
  });
  if (!config.allow_zero_noise) {
    mixture.epsilon = RunStage(
        "accountant", [&] { return EpsilonForDelta(mixture.privacy); });
    if (!std::isfinite(mixture.epsilon.epsilon)) {
      throw StageError("accountant", NumericalError("epsilon is not finite"));
    }
  } else {
    mixture.epsilon = {std::numeric_limits<double>::infinity(), 0,
                       mixture.privacy.delta};
  }

  // Stage 1: private partition in random-feature space.
  Partition partition =
      RunStage("kmeans", [&] { return PartitionDataset(dataset, config); });
  const Clustering& clustering = partition.clustering;
  mixture.feature_map = std::move(partition.feature_map);
  if (log) {
    nlohmann::json line = ClusteringSummaryJson(clustering, partition.kmeans);
    line["event"] = "kmeans";
    log(line);
  }
  mixture.centers = clustering.noisy_centers;
  mixture.weights.resize(config.k);
  for (int c = 0; c < config.k; ++c) {
    mixture.weights[c] = std::max(0.0, clustering.noisy_sizes[c]);
  }

  std::vector<std::vector<std::size_t>> members(config.k);
  for (std::size_t i = 0; i < clustering.assignments.size(); ++i) {
    members[clustering.assignments[i]].push_back(i);
  }
  std::vector<BinaryDataset> clusters;
  std::vector<double> true_sizes;
  for (int c = 0; c < config.k; ++c) {
    clusters.push_back(dataset.Subset(members[c]));
    true_sizes.push_back(static_cast<double>(members[c].size()));
  }

  // Stage 2: one generative model per cluster.
  Rng init_rng = seeds.Stream(kModelInitStream);
  const SeedTree chain_seeds(seeds.ChildSeed(kChainsStream));
  std::vector<RbmTrainer> trainers;
  for (int c = 0; c < config.k; ++c) {
    RbmModel model =
        RandomRbm(m, config.hidden_units, config.weight_stddev, init_rng);
    PersistentChains chains(
        config.batch_size, m,
        chain_seeds.ChildSeed("cluster-" + std::to_string(c)));
    trainers.emplace_back(std::move(model), std::move(chains),
                          config.gibbs_steps);
  }

  SgdConfig sgd;
  sgd.sigma_c = config.sigma_c;
  sgd.sigma_g = config.sigma_g;
  sgd.batch_size = config.batch_size;
  sgd.learning_rate = config.learning_rate;
  sgd.norm = config.norm;
  std::vector<SgdState> states(config.k, SgdState::Initial(sgd));
  Rng selection_rng = seeds.Stream(kSgdSelectionStream);
  Rng sampling_rng = seeds.Stream(kSgdSamplingStream);
  Rng noise_rng = seeds.Stream(kSgdNoiseStream);

  RunStage("sgd", [&] {
    for (std::int64_t t = 0; t < mixture.privacy.t_s; ++t) {
      const int s = SelectWeighted(true_sizes, selection_rng);
      SgdStepRecord record = DpSgdStep(trainers[s], clusters[s], sgd, states[s],
                                       sampling_rng, noise_rng);
      if (!trainers[s].model().AllFinite()) {
        throw NumericalError("model parameters diverged at step " +
                             std::to_string(t));
      }
      if (log) {
        nlohmann::json line = record.ToJson();
        line["event"] = "sgd_step";
        line["iteration"] = t;
        line["cluster"] = s;
        log(line);
      }
    }
    return 0;
  });

  for (const auto& trainer : trainers)
    mixture.models.push_back(trainer.model());
  return mixture;
}

BinaryDataset GenerateSynthetic(const MixtureModel& mixture, std::size_t count,
                                int gibbs_steps, Rng& rng) {
  if (count < 1) throw DomainError("count must be at least 1");
  if (mixture.models.empty() ||
      mixture.models.size() != mixture.weights.size()) {
    throw DomainError("mixture has no models or mismatched weights");
  }
  std::vector<int> choice(count);
  std::vector<int> per_model(mixture.models.size(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    choice[i] = SelectWeighted(mixture.weights, rng);
    ++per_model[choice[i]];
  }
  std::vector<std::vector<BinaryRecord>> drawn(mixture.models.size());
  for (std::size_t c = 0; c < mixture.models.size(); ++c) {
    drawn[c] =
        SampleRbmBatch(mixture.models[c], per_model[c], gibbs_steps, rng);
  }
  std::vector<std::size_t> next(mixture.models.size(), 0);
  std::vector<BinaryRecord> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    records.push_back(std::move(drawn[choice[i]][next[choice[i]]++]));
  }
  return BinaryDataset(mixture.m, std::move(records),
                       RecordPolicy::kAllowEmpty);
}

nlohmann::json ToJson(const MixtureModel& mixture) {
  nlohmann::json centers = nlohmann::json::array();
  for (Eigen::Index r = 0; r < mixture.centers.rows(); ++r) {
    centers.push_back(RowToVector(mixture.centers, r));
  }
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& model : mixture.models) clusters.push_back(ToJson(model));

  nlohmann::json privacy = ToJson(mixture.privacy);
  privacy["epsilon"] = mixture.epsilon.epsilon;
  privacy["epsilon_lambda"] = mixture.epsilon.lambda;

  if (!mixture.feature_map.seed) {
    throw DomainError("only seed-backed feature maps can be serialized");
  }
  return {
      {"version", kModelFileVersion},
      {"m", mixture.m},
      {"k", mixture.k},
      {"gamma", mixture.feature_map.gamma},
      {"d", mixture.feature_map.feature_dimension()},
      {"feature_map_seed", *mixture.feature_map.seed},
      {"centers", centers},
      {"weights", mixture.weights},
      {"weights_note",
       "generation weights are the noisy cluster sizes of the last "
       "clustering iteration; training-time cluster selection used the true "
       "sizes, which are never stored"},
      {"clusters", clusters},
      {"privacy", privacy},
      {"config", mixture.config_echo},
  };
}

MixtureModel MixtureFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != kModelFileVersion) {
      throw ValidationError("unsupported model file version " +
                            std::to_string(version));
    }
    MixtureModel mixture;
    mixture.m = j.at("m").get<int>();
    mixture.k = j.at("k").get<int>();
    mixture.feature_map = FeatureMapFromSeed(
        mixture.m, j.at("d").get<int>(), j.at("gamma").get<double>(),
        j.at("feature_map_seed").get<std::uint64_t>());
    const auto& centers = j.at("centers");
    mixture.centers.resize(centers.size(),
                           mixture.feature_map.feature_dimension());
    for (std::size_t r = 0; r < centers.size(); ++r) {
      const auto row = centers[r].get<std::vector<double>>();
      if (row.size() !=
          static_cast<std::size_t>(mixture.feature_map.feature_dimension())) {
        throw ValidationError("center has the wrong dimension");
      }
      for (std::size_t c = 0; c < row.size(); ++c)
        mixture.centers(r, c) = row[c];
    }
    mixture.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& cluster : j.at("clusters")) {
      mixture.models.push_back(RbmFromJson(cluster));
      if (mixture.models.back().visible_units() != mixture.m) {
        throw ValidationError("cluster model does not match m");
      }
    }
    if (static_cast<int>(mixture.models.size()) != mixture.k ||
        static_cast<int>(mixture.weights.size()) != mixture.k) {
      throw ValidationError("model file must hold k models and k weights");
    }
    const auto& privacy = j.at("privacy");
    mixture.privacy = PrivacyConfigFromJson(privacy);
    mixture.epsilon.epsilon = privacy.at("epsilon").is_null()
                                  ? std::numeric_limits<double>::infinity()
                                  : privacy.at("epsilon").get<double>();
    mixture.epsilon.lambda = privacy.at("epsilon_lambda").get<int>();
    mixture.epsilon.delta = mixture.privacy.delta;
    if (j.contains("config")) mixture.config_echo = j.at("config");
    return mixture;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace dpgm
