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

// Bernoulli restricted Boltzmann machine with energy
//   E(v, h) = -v' W' h - b' v - c' h
// where W is stored hidden x visible. Training uses persistent contrastive
// divergence with a negative phase shared by every example of a batch, so a
// per-example gradient depends on its own record only.

#ifndef DPGM_RBM_H_
#define DPGM_RBM_H_

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>

#include "dpgm/data.h"
#include "dpgm/dp_sgd.h"
#include "dpgm/random.h"

namespace dpgm {

inline constexpr int kDefaultHiddenUnits = 200;
inline constexpr double kDefaultWeightStddev = 0.01;
inline constexpr int kDefaultBurnIn = 500;

struct RbmModel {
  Eigen::MatrixXd weights;       // n x m, w_ij couples hidden i, visible j
  Eigen::VectorXd visible_bias;  // b, length m
  Eigen::VectorXd hidden_bias;   // c, length n

  RbmModel() = default;
  RbmModel(int visible, int hidden);

  int visible_units() const { return static_cast<int>(weights.cols()); }
  int hidden_units() const { return static_cast<int>(weights.rows()); }
  Eigen::Index ParameterCount() const;

  // Layout: W row-major (hidden-major), then b, then c.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& parameters);
  bool AllFinite() const;
};

// W ~ N(0, weight_stddev^2), b = c = 0.
RbmModel RandomRbm(int visible, int hidden, double weight_stddev, Rng& rng);

double Energy(const RbmModel& model, const Eigen::VectorXd& v,
              const Eigen::VectorXd& h);

// p(h_i = 1 | v) = logistic(c_i + sum_j w_ij v_j).
Eigen::VectorXd HiddenProbabilities(const RbmModel& model,
                                    const Eigen::VectorXd& v);
// p(v_j = 1 | h) = logistic(b_j + sum_i w_ij h_i).
Eigen::VectorXd VisibleProbabilities(const RbmModel& model,
                                     const Eigen::VectorXd& h);

// Sufficient statistic (p(h|v) v', v, p(h|v)) in the Flatten() layout.
Eigen::VectorXd PositiveStatistic(const RbmModel& model,
                                  const Eigen::VectorXd& v);

// Gibbs chains that persist across updates. Their state depends only on the
// parameter history and the chain seed, never on training records.
class PersistentChains {
 public:
  PersistentChains(int count, int visible, std::uint64_t seed);

  int size() const { return static_cast<int>(states_.rows()); }
  const Eigen::MatrixXd& states() const { return states_; }

  // Runs `sweeps` full Gibbs sweeps (h | v, then v | h) on every chain.
  void Advance(const RbmModel& model, int sweeps);

  // Mean over chains of PositiveStatistic(chain state).
  Eigen::VectorXd NegativeStatistic(const RbmModel& model) const;

 private:
  Eigen::MatrixXd states_;  // chains x m
  Rng rng_;
};

// Advances the chains, then returns one column per record:
// g(x_i) = PositiveStatistic(x_i) - NegativeStatistic, the log-likelihood
// ascent direction. An empty batch returns an empty matrix and leaves the
// chains untouched.
Eigen::MatrixXd PcdPerExampleGradients(const RbmModel& model,
                                       const Batch& batch,
                                       PersistentChains& chains,
                                       int gibbs_steps);

// One record from `gibbs_steps` sweeps started at Bernoulli(1/2) noise.
BinaryRecord SampleRbm(const RbmModel& model, int gibbs_steps, Rng& rng);
// `count` independent samples, drawn as one block of chains.
std::vector<BinaryRecord> SampleRbmBatch(const RbmModel& model, int count,
                                         int gibbs_steps, Rng& rng);

// DP-SGD adapter: loss = negative log-likelihood, so the per-example loss
// gradient is -g(x_i).
class RbmTrainer : public DifferentiableModel {
 public:
  RbmTrainer(RbmModel model, PersistentChains chains, int gibbs_steps);

  Eigen::VectorXd Parameters() const override { return model_.Flatten(); }
  void SetParameters(const Eigen::VectorXd& parameters) override;
  Eigen::MatrixXd PerExampleLossGradients(const Batch& batch) override;

  const RbmModel& model() const { return model_; }
  const PersistentChains& chains() const { return chains_; }

 private:
  RbmModel model_;
  PersistentChains chains_;
  int gibbs_steps_;
};

nlohmann::json ToJson(const RbmModel& model);
RbmModel RbmFromJson(const nlohmann::json& j);

}  // namespace dpgm

#endif  // DPGM_RBM_H_
