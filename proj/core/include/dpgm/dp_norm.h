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

#ifndef DPGM_DP_NORM_H_
#define DPGM_DP_NORM_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "dpgm/random.h"

namespace dpgm {

struct DpNormOptions {
  double c_max = 10.0;
  int bins = 100;
};

// Histogram of vector norms over the bins (C_{j-1}, C_j], C_j = j c_max / w.
// A zero norm is counted in the first bin; norms above c_max are dropped,
// so one record moves at most one unit between two bins.
class NormHistogram {
 public:
  NormHistogram(std::span<const double> norms, const DpNormOptions& options);

  double c_max() const { return c_max_; }
  int bins() const { return static_cast<int>(counts_.size()); }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  std::int64_t overflow() const { return overflow_; }
  // Upper edge C_j of bin j, 1 <= j <= bins.
  double UpperEdge(int j) const { return j * c_max_ / bins(); }

  // 1-based bin for a norm, or 0 when the norm exceeds c_max.
  int BinOf(double norm) const;

 private:
  double c_max_;
  std::vector<std::int64_t> counts_;
  std::int64_t overflow_ = 0;
};

// Noisy mode of the norm histogram: adds N(0, (sqrt(2) sigma_c)^2) to every
// count and returns the upper edge of the largest noisy bin, ties going to
// the smaller edge. sigma_c = 0 disables the noise and is meant for tests.
// Throws DomainError on an empty input or non-finite norms.
double DpNorm(std::span<const double> norms, double sigma_c,
              const DpNormOptions& options, Rng& rng);

// Convenience overload taking the rows of `vectors`.
double DpNormOfRows(const Eigen::MatrixXd& vectors, double sigma_c,
                    const DpNormOptions& options, Rng& rng);

}  // namespace dpgm

#endif  // DPGM_DP_NORM_H_
