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

#ifndef DPGM_CLIPPING_H_
#define DPGM_CLIPPING_H_

#include <Eigen/Dense>
#include <string>

#include "dpgm/errors.h"

namespace dpgm {

// v / max(1, ||v|| / bound). Vectors within the bound are returned unchanged.
template <typename Derived>
Eigen::VectorXd ClipToNorm(const Eigen::MatrixBase<Derived>& v, double bound) {
  if (!(bound > 0.0)) {
    throw DomainError("clipping bound must be positive, got " +
                      std::to_string(bound));
  }
  const double norm = v.norm();
  if (norm <= bound) return v;
  return v * (bound / norm);
}

// Clips every row of `rows` in place.
inline void ClipRowsInPlace(Eigen::MatrixXd& rows, double bound) {
  if (!(bound > 0.0)) {
    throw DomainError("clipping bound must be positive, got " +
                      std::to_string(bound));
  }
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm > bound) rows.row(i) *= bound / norm;
  }
}

}  // namespace dpgm

#endif  // DPGM_CLIPPING_H_
