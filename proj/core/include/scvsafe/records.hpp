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
#include <span>
#include <vector>

namespace scvsafe {

/// Likelihood bookkeeping for one critical moment: the probability of the
/// action that was actually taken under the naturalistic model, under the
/// mixture importance function, and under each of the J component functions.
struct CriticalStepRecord {
  double p = 1.0;
  double q_alpha = 1.0;
  std::vector<double> q;

  friend bool operator==(const CriticalStepRecord&, const CriticalStepRecord&) = default;
};

/// Outcome of one tested scenario.
struct TestRecord {
  std::int64_t test_id = 0;
  double crash_prob = 0.0;
  std::vector<CriticalStepRecord> steps;
  std::size_t num_control_steps = 0;
  /// Cached product of p / q_alpha over all critical steps.
  double weight = 1.0;

  /// Recomputes prod_l p_l / q_alpha_l from the steps; 1 when there are none.
  /// Throws std::domain_error("support violation") on a zero q_alpha.
  [[nodiscard]] double likelihood_ratio() const;

  /// crash_prob * likelihood_ratio(), the importance-weighted contribution.
  [[nodiscard]] double weighted_outcome() const { return crash_prob * likelihood_ratio(); }

  friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

/// Number of mixture components recorded on the steps (0 for a record with
/// no critical steps).
std::size_t component_count(const TestRecord& record);

/// Largest component count over a batch; the J used by the CV estimators.
std::size_t component_count(std::span<const TestRecord> records);

/// Checks the record invariants and throws std::invalid_argument describing
/// the first violation. When alpha is non-empty the mixture identity
/// q_alpha == sum_j alpha_j q_j is also checked to mixture_tol.
void validate_record(const TestRecord& record, std::span<const double> alpha = {},
                     double mixture_tol = 1e-12);

}  // namespace scvsafe
