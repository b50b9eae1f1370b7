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

// One differentially private SGD step with a per-batch clipping bound chosen
// privately from the batch's gradient norms.

#ifndef DPGM_DP_SGD_H_
#define DPGM_DP_SGD_H_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>

#include "dpgm/data.h"
#include "dpgm/dp_norm.h"
#include "dpgm/random.h"

namespace dpgm {

// A model trained by DP-SGD. The only requirement is per-example gradients
// of the loss; a shared statistic that does not depend on the batch (such as
// the negative phase of persistent contrastive divergence) may enter every
// example's gradient.
class DifferentiableModel {
 public:
  virtual ~DifferentiableModel() = default;

  virtual Eigen::VectorXd Parameters() const = 0;
  virtual void SetParameters(const Eigen::VectorXd& parameters) = 0;

  // Column i is the gradient of the loss for batch record i. Called with a
  // non-empty batch only.
  virtual Eigen::MatrixXd PerExampleLossGradients(const Batch& batch) = 0;
};

struct SgdConfig {
  double sigma_c = 4.0;
  double sigma_g = 1.0;
  int batch_size = 100;  // L, the expected batch size and the divisor
  double learning_rate = 0.01;
  DpNormOptions norm;
  // Skips the private norm selection and clips to this bound. The privacy
  // accounting is unchanged; used for tests and fixed-bound experiments.
  std::optional<double> fixed_clip_bound;

  void Validate(bool allow_zero_noise) const;
};

// Carries the clipping bound of the last non-empty batch, which scales the
// noise of an empty batch.
struct SgdState {
  double previous_clip_bound = 0.0;
  std::int64_t step = 0;

  static SgdState Initial(const SgdConfig& config) {
    return {config.norm.c_max / 2.0, 0};
  }
};

struct SgdStepRecord {
  std::int64_t step = 0;
  std::size_t batch_size = 0;
  double sampling_probability = 0.0;
  double clip_bound = 0.0;
  double norm_min = 0.0;
  double norm_mean = 0.0;
  double norm_max = 0.0;
  std::size_t norms_clipped = 0;
  std::size_t norms_over_c_max = 0;

  nlohmann::json ToJson() const;
};

// g / max(1, ||g|| / bound).
Eigen::VectorXd ClipGradient(const Eigen::VectorXd& gradient, double bound);

// Samples a Poisson batch with q = min(1, L / |cluster|), selects the bound
// from the batch's gradient norms, clips, sums, adds N(0, (sqrt(2) sigma_g
// C_s)^2) per coordinate, divides by L and takes one descent step.
// `sampling` drives batch selection; `noise` drives every Gaussian draw.
SgdStepRecord DpSgdStep(DifferentiableModel& model,
                        const BinaryDataset& cluster, const SgdConfig& config,
                        SgdState& state, Rng& sampling, Rng& noise);

}  // namespace dpgm

#endif  // DPGM_DP_SGD_H_
