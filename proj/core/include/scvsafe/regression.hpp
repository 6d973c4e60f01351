// Copyright 2026 The scvsafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <Eigen/Core>

namespace scvsafe {

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kSvdRelTol = 1e-10;

struct RegressionFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  /// y - intercept - H * coefficients, one entry per design row.
  Eigen::VectorXd residuals;
  /// Numerical rank of the design; never exceeds min(rows, cols).
  Eigen::Index rank = 0;
};

/// Multiple linear regression of y on a column-centered design H with an
/// intercept. The coefficients are the minimum-norm least-squares solution
/// obtained from a truncated SVD, so rank-deficient and wide designs
/// (fewer rows than columns) are well defined. Throws
/// std::invalid_argument("invalid design") on non-finite input.
RegressionFit fit_mlr_svd(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::MatrixXd>& design,
                          double rel_tol = kSvdRelTol);

/// Subtracts each column's mean in place and returns the means.
Eigen::RowVectorXd center_columns(Eigen::MatrixXd& design);

}  // namespace scvsafe
