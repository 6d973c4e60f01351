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
#include <optional>
#include <span>
#include <vector>

#include "scvsafe/records.hpp"

namespace scvsafe {

inline constexpr double kDefaultConfidence = 0.90;

/// Point estimate with its asymptotic variance and confidence half-width.
struct EstimateReport {
  double mean = 0.0;
  /// Sample variance (denominator n - 1) of the per-test contributions.
  double asymptotic_variance = 0.0;
  std::size_t n = 0;
  double half_width = 0.0;
  /// half_width / mean; empty when mean == 0.
  std::optional<double> rhw;
  double confidence = kDefaultConfidence;

  /// With a single sample the variance is reported as 0 and not trustworthy.
  [[nodiscard]] bool reliable() const { return n > 1; }
};

/// z such that P(|N(0,1)| <= z) == confidence.
double normal_quantile_two_sided(double confidence);

/// Builds a report from per-test contributions. Throws "no samples" on empty input.
EstimateReport summarize(std::span<const double> contributions,
                         double confidence = kDefaultConfidence);

/// Plain average of crash_prob over records sampled from the naturalistic model.
EstimateReport crude_monte_carlo(std::span<const TestRecord> records,
                                 double confidence = kDefaultConfidence);

/// Y_i = crash_prob_i * prod_l p_l / q_alpha_l for every record.
std::vector<double> weighted_outcomes(std::span<const TestRecord> records);

EstimateReport importance_weighted_estimate(std::span<const TestRecord> records,
                                            double confidence = kDefaultConfidence);

/// Ordinary control variates over the mixture: Y_i - sum_j beta_j Z_ij with
/// Z_ij = prod_l q_j,l / q_alpha,l - 1 for j = 1..J-1. beta is held fixed.
std::vector<double> ordinary_cv_contributions(std::span<const TestRecord> records,
                                              std::span<const double> beta);

EstimateReport ordinary_cv_estimate(std::span<const TestRecord> records,
                                    std::span<const double> beta,
                                    double confidence = kDefaultConfidence);

std::optional<double> relative_half_width(const EstimateReport& report);

}  // namespace scvsafe
