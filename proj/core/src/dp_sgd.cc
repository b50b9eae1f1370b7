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

#include "dpgm/dp_sgd.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dpgm/clipping.h"
#include "dpgm/errors.h"

namespace dpgm {

void SgdConfig::Validate(bool allow_zero_noise) const {
  if (batch_size < 1) throw DomainError("batch size L must be at least 1");
  if (!(learning_rate > 0.0)) {
    throw DomainError("learning rate must be positive");
  }
  const bool positive = sigma_c > 0.0 && sigma_g > 0.0;
  const bool non_negative = sigma_c >= 0.0 && sigma_g >= 0.0;
  if (!(allow_zero_noise ? non_negative : positive)) {
    throw DomainError(allow_zero_noise ? "noise scales must be non-negative"
                                       : "noise scales must be positive");
  }
  if (fixed_clip_bound && !(*fixed_clip_bound > 0.0)) {
    throw DomainError("fixed clipping bound must be positive");
  }
}

nlohmann::json SgdStepRecord::ToJson() const {
  return {
      {"step", step},
      {"batch_size", batch_size},
      {"q", sampling_probability},
      {"clip_bound", clip_bound},
      {"norm_min", norm_min},
      {"norm_mean", norm_mean},
      {"norm_max", norm_max},
      {"norms_clipped", norms_clipped},
      {"norms_over_c_max", norms_over_c_max},
  };
}

Eigen::VectorXd ClipGradient(const Eigen::VectorXd& gradient, double bound) {
  return ClipToNorm(gradient, bound);
}

SgdStepRecord DpSgdStep(DifferentiableModel& model,
                        const BinaryDataset& cluster, const SgdConfig& config,
                        SgdState& state, Rng& sampling, Rng& noise) {
  if (cluster.empty()) throw DomainError("DP-SGD step on an empty cluster");
  if (config.batch_size < 1) throw DomainError("batch size L must be >= 1");
  if (config.learning_rate < 0.0) {
    throw DomainError("learning rate must be non-negative");
  }

  SgdStepRecord record;
  record.step = state.step++;
  record.sampling_probability =
      std::min(1.0, static_cast<double>(config.batch_size) /
                        static_cast<double>(cluster.size()));
  const Batch batch =
      SampleBatch(cluster, record.sampling_probability, sampling);
  record.batch_size = batch.size();

  Eigen::VectorXd theta = model.Parameters();
  Eigen::VectorXd noisy_sum = Eigen::VectorXd::Zero(theta.size());
  double clip_bound = state.previous_clip_bound;

  if (!batch.empty()) {
    Eigen::MatrixXd gradients = model.PerExampleLossGradients(batch);
    if (gradients.rows() != theta.size() ||
        gradients.cols() != static_cast<Eigen::Index>(batch.size())) {
      throw DomainError("per-example gradients have the wrong shape");
    }
    std::vector<double> norms(batch.size());
    for (std::size_t i = 0; i < norms.size(); ++i) {
      norms[i] = gradients.col(i).norm();
      if (!std::isfinite(norms[i])) {
        throw NumericalError("non-finite per-example gradient");
      }
    }
    clip_bound = config.fixed_clip_bound
                     ? *config.fixed_clip_bound
                     : DpNorm(norms, config.sigma_c, config.norm, noise);

    double norm_total = 0.0;
    record.norm_min = norms.front();
    record.norm_max = norms.front();
    for (std::size_t i = 0; i < norms.size(); ++i) {
      norm_total += norms[i];
      record.norm_min = std::min(record.norm_min, norms[i]);
      record.norm_max = std::max(record.norm_max, norms[i]);
      if (norms[i] > clip_bound) {
        ++record.norms_clipped;
        gradients.col(i) *= clip_bound / norms[i];
      }
      if (norms[i] > config.norm.c_max) ++record.norms_over_c_max;
      noisy_sum += gradients.col(i);
    }
    record.norm_mean = norm_total / static_cast<double>(norms.size());
    state.previous_clip_bound = clip_bound;
  }
  record.clip_bound = clip_bound;

  const double stddev = std::numbers::sqrt2 * config.sigma_g * clip_bound;
  for (Eigen::Index j = 0; j < noisy_sum.size(); ++j) {
    noisy_sum[j] += GaussianNoise(noise, stddev);
  }
  const Eigen::VectorXd noisy_gradient =
      noisy_sum / static_cast<double>(config.batch_size);
  model.SetParameters(theta - config.learning_rate * noisy_gradient);
  return record;
}

}  // namespace dpgm
