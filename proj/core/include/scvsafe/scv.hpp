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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "scvsafe/estimators.hpp"
#include "scvsafe/records.hpp"
#include "scvsafe/regression.hpp"

namespace scvsafe {

inline constexpr std::size_t kDefaultMaxControlSteps = 9;

struct ScvOptions {
  /// Records with more critical steps share the last stratum and only their
  /// first max_control_steps steps enter the design.
  std::size_t max_control_steps = kDefaultMaxControlSteps;
  /// Strata with fewer rows skip the regression (coefficients forced to 0).
  std::size_t min_regression_rows = 3;
  double rel_tol = kSvdRelTol;
  /// Forces every coefficient to zero; reproduces the plain weighted estimator.
  bool zero_coefficients = false;
  double confidence = kDefaultConfidence;
};

/// Records partitioned by (capped) number of control steps. The batch views
/// the caller's records; it does not own them.
struct StratifiedBatch {
  std::span<const TestRecord> records;
  /// strata[l] holds indices into records, in input order.
  std::vector<std::vector<std::size_t>> strata;
  std::size_t max_control_steps = kDefaultMaxControlSteps;

  [[nodiscard]] std::size_t size() const { return records.size(); }
};

StratifiedBatch stratify(std::span<const TestRecord> records,
                         std::size_t max_control_steps = kDefaultMaxControlSteps);

/// (J - 1)^l, the number of sparse control variates in stratum l.
std::size_t scv_column_count(std::size_t l, std::size_t components);

/// Tensor-product design row for stratum l: entry (j_1, ..., j_l) in
/// lexicographic order (j_1 most significant, each in 1..J-1) equals
/// prod_ell q_{j_ell, ell} / q_alpha_ell over the first l critical steps.
std::vector<double> scv_design_row(const TestRecord& record, std::size_t l, std::size_t components);

struct StratumFit {
  std::size_t l = 0;
  std::size_t n_l = 0;
  std::size_t d_l = 0;
  /// n_l * intercept / n, this stratum's share of the estimate.
  double mu_hat = 0.0;
  RegressionFit fit;
  double residual_variance = 0.0;
};

/// Fits one stratum: Y = crash_prob * full likelihood ratio, H = design rows
/// centered by the stratum column means, then MLR via fit_mlr_svd.
StratumFit estimate_stratum(std::span<const TestRecord> stratum_records, std::size_t l,
                            std::size_t components, std::size_t n_total,
                            const ScvOptions& options = {});

struct ScvResult {
  EstimateReport report;
  /// One entry per stratum 0..max_control_steps (empty strata included).
  std::vector<StratumFit> strata;
  /// Adjusted contribution Y_i - (h_i - hbar_l) * beta_l for every input
  /// record, aligned with the input order.
  std::vector<double> adjusted;
};

ScvResult scv_estimate(const StratifiedBatch& batch, std::size_t components,
                       const ScvOptions& options = {});

/// Convenience: stratify then estimate, inferring J from the records.
ScvResult scv_estimate(std::span<const TestRecord> records, const ScvOptions& options = {});

/// Compact per-record view used when the same records are re-estimated many
/// times (prefixes, shuffles): weighted outcome, stratum and the per-step
/// ratios q_j / q_alpha (j < J) of the first l steps, row-major.
struct ScvFeatures {
  double y = 0.0;
  std::uint32_t stratum = 0;
  std::vector<double> ratios;
};

std::vector<ScvFeatures> extract_scv_features(std::span<const TestRecord> records,
                                              std::size_t components,
                                              std::size_t max_control_steps);

/// SCV estimate over features[order[0..count)] (all features in order when
/// order is empty). Adjusted contributions follow that order.
ScvResult scv_estimate_features(std::span<const ScvFeatures> features, std::size_t components,
                                const ScvOptions& options,
                                std::span<const std::size_t> order = {},
                                std::size_t count = static_cast<std::size_t>(-1));

/// Per-stratum diagnostic table: l,n_l,d_l,rank,mu_hat,residual_variance.
void write_strata_csv(std::ostream& out, std::span<const StratumFit> strata);

}  // namespace scvsafe
