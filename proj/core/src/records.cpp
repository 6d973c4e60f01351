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
#include "scvsafe/records.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace scvsafe {

double TestRecord::likelihood_ratio() const {
  double ratio = 1.0;
  for (const auto& step : steps) {
    if (!(step.q_alpha > 0.0)) {
      throw std::domain_error("support violation: q_alpha == 0 on test " + std::to_string(test_id));
    }
    ratio *= step.p / step.q_alpha;
  }
  return ratio;
}

std::size_t component_count(const TestRecord& record) {
  return record.steps.empty() ? 0 : record.steps.front().q.size();
}

std::size_t component_count(std::span<const TestRecord> records) {
  std::size_t j = 0;
  for (const auto& r : records) {
    j = std::max(j, component_count(r));
  }
  return j;
}

void validate_record(const TestRecord& record, std::span<const double> alpha, double mixture_tol) {
  const std::string where = "test " + std::to_string(record.test_id) + ": ";
  if (!(record.crash_prob >= 0.0 && record.crash_prob <= 1.0)) {
    throw std::invalid_argument(where + "crash_prob outside [0, 1]");
  }
  if (record.num_control_steps != record.steps.size()) {
    throw std::invalid_argument(where + "num_control_steps does not match the step list");
  }
  const std::size_t j = component_count(record);
  for (const auto& step : record.steps) {
    if (!(step.q_alpha > 0.0) || !(step.p > 0.0)) {
      throw std::invalid_argument(where + "non-positive step probability");
    }
    if (step.q.size() != j) {
      throw std::invalid_argument(where + "inconsistent component count across steps");
    }
    if (!alpha.empty()) {
      if (alpha.size() != j) {
        throw std::invalid_argument(where + "mixture weight count differs from component count");
      }
      double mix = 0.0;
      for (std::size_t k = 0; k < j; ++k) {
        mix += alpha[k] * step.q[k];
      }
      if (std::abs(mix - step.q_alpha) > mixture_tol) {
        throw std::invalid_argument(where + "q_alpha differs from the alpha-weighted mixture");
      }
    }
  }
  const double recomputed = record.likelihood_ratio();
  if (std::abs(recomputed - record.weight) > 1e-12 * std::max(1.0, std::abs(recomputed))) {
    throw std::invalid_argument(where + "cached weight disagrees with the step product");
  }
}

}  // namespace scvsafe
