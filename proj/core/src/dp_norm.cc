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

#include "dpgm/dp_norm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpgm/errors.h"

namespace dpgm {

NormHistogram::NormHistogram(std::span<const double> norms,
                             const DpNormOptions& options)
    : c_max_(options.c_max) {
  if (options.bins < 1) throw DomainError("bin count must be at least 1");
  if (!(options.c_max > 0.0)) throw DomainError("c_max must be positive");
  counts_.assign(options.bins, 0);
  for (double norm : norms) {
    if (!std::isfinite(norm) || norm < 0.0) {
      throw DomainError("norms must be finite and non-negative");
    }
    const int j = BinOf(norm);
    if (j == 0) {
      ++overflow_;
    } else {
      ++counts_[j - 1];
    }
  }
}

int NormHistogram::BinOf(double norm) const {
  if (norm > c_max_) return 0;
  if (norm == 0.0) return 1;
  const int w = bins();
  int j = static_cast<int>(std::ceil(norm * w / c_max_));
  // Guard against rounding in the division; edges are C_j = j c_max / w.
  j = std::clamp(j, 1, w);
  while (j > 1 && norm <= UpperEdge(j - 1)) --j;
  while (j < w && norm > UpperEdge(j)) ++j;
  return j;
}

double DpNorm(std::span<const double> norms, double sigma_c,
              const DpNormOptions& options, Rng& rng) {
  if (norms.empty()) throw DomainError("DpNorm needs at least one vector");
  if (!(sigma_c >= 0.0)) throw DomainError("sigma_c must be non-negative");
  const NormHistogram histogram(norms, options);
  const double stddev = std::numbers::sqrt2 * sigma_c;
  int best_bin = 1;
  double best_count = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= histogram.bins(); ++j) {
    const double noisy = static_cast<double>(histogram.counts()[j - 1]) +
                         GaussianNoise(rng, stddev);
    if (noisy > best_count) {
      best_count = noisy;
      best_bin = j;
    }
  }
  return histogram.UpperEdge(best_bin);
}

double DpNormOfRows(const Eigen::MatrixXd& vectors, double sigma_c,
                    const DpNormOptions& options, Rng& rng) {
  std::vector<double> norms(vectors.rows());
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    norms[i] = vectors.row(i).norm();
  }
  return DpNorm(norms, sigma_c, options, rng);
}

}  // namespace dpgm
