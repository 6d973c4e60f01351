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
#include "scvsafe/regression.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <stdexcept>

namespace scvsafe {
namespace {

// Minimum-norm solution of A x ~= b through a thresholded SVD.
Eigen::VectorXd svd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rel_tol,
                          Eigen::Index& rank) {
  // BDCSVD in Eigen 3.4.0 indexes out of bounds during deflation on heavily
  // repeated singular values, which sparse CV designs produce routinely.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rel_tol * sv(0) : 0.0;
  rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      ++rank;
    }
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  if (rank == 0) {
    return x;
  }
  const Eigen::VectorXd utb = svd.matrixU().leftCols(rank).transpose() * b;
  x = svd.matrixV().leftCols(rank) * (utb.array() / sv.head(rank).array()).matrix();
  return x;
}

}  // namespace

Eigen::RowVectorXd center_columns(Eigen::MatrixXd& design) {
  if (design.rows() == 0) {
    return Eigen::RowVectorXd::Zero(design.cols());
  }
  Eigen::RowVectorXd means = design.colwise().mean();
  design.rowwise() -= means;
  return means;
}

RegressionFit fit_mlr_svd(const Eigen::Ref<const Eigen::VectorXd>& y,
                          const Eigen::Ref<const Eigen::MatrixXd>& design, double rel_tol) {
  const Eigen::Index m = y.size();
  const Eigen::Index d = design.cols();
  if (m < 1) {
    throw std::invalid_argument("fit_mlr_svd: at least one observation is required");
  }
  if (design.rows() != m) {
    throw std::invalid_argument("fit_mlr_svd: design rows differ from response length");
  }
  if (!y.allFinite() || !design.allFinite()) {
    throw std::invalid_argument("invalid design: non-finite entries");
  }

  RegressionFit fit;
  fit.intercept = y.mean();
  const Eigen::VectorXd centered = y.array() - fit.intercept;

  if (d == 0) {
    fit.coefficients.resize(0);
  } else if (m > d) {
    // Tall design: reduce to the d x d triangular factor first. H = QR has the
    // same singular values and right singular vectors as R.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    const Eigen::VectorXd qtb = (qr.householderQ().transpose() * centered).head(d);
    fit.coefficients = svd_solve(r, qtb, rel_tol, fit.rank);
  } else {
    fit.coefficients = svd_solve(design, centered, rel_tol, fit.rank);
  }

  fit.residuals = centered;
  if (d > 0) {
    fit.residuals.noalias() -= design * fit.coefficients;
  }
  return fit;
}

}  // namespace scvsafe
