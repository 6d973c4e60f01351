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
#include "scvsafe/estimators.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

namespace scvsafe {

double normal_quantile_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must lie in (0, 1)");
  }
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + confidence / 2.0);
}

EstimateReport summarize(std::span<const double> contributions, double confidence) {
  if (contributions.empty()) {
    throw std::invalid_argument("no samples");
  }
  EstimateReport report;
  report.n = contributions.size();
  report.confidence = confidence;

  double sum = 0.0;
  for (double c : contributions) {
    sum += c;
  }
  report.mean = sum / static_cast<double>(report.n);

  if (report.n > 1) {
    double ss = 0.0;
    for (double c : contributions) {
      const double d = c - report.mean;
      ss += d * d;
    }
    report.asymptotic_variance = ss / static_cast<double>(report.n - 1);
  }
  report.half_width = normal_quantile_two_sided(confidence) *
                      std::sqrt(report.asymptotic_variance / static_cast<double>(report.n));
  report.rhw = relative_half_width(report);
  return report;
}

EstimateReport crude_monte_carlo(std::span<const TestRecord> records, double confidence) {
  std::vector<double> outcomes;
  outcomes.reserve(records.size());
  for (const auto& r : records) {
    outcomes.push_back(r.crash_prob);
  }
  return summarize(outcomes, confidence);
}

std::vector<double> weighted_outcomes(std::span<const TestRecord> records) {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) {
    y.push_back(r.crash_prob * r.likelihood_ratio());
  }
  return y;
}

EstimateReport importance_weighted_estimate(std::span<const TestRecord> records, double confidence) {
  return summarize(weighted_outcomes(records), confidence);
}

std::vector<double> ordinary_cv_contributions(std::span<const TestRecord> records,
                                              std::span<const double> beta) {
  const std::size_t j = component_count(records);
  if (j > 0 && beta.size() != j - 1) {
    throw std::invalid_argument("beta must have J - 1 = " + std::to_string(j - 1) + " entries, got " +
                                std::to_string(beta.size()));
  }
  std::vector<double> out;
  out.reserve(records.size());
  std::vector<double> ratio(beta.size());
  for (const auto& r : records) {
    double value = r.crash_prob * r.likelihood_ratio();
    std::fill(ratio.begin(), ratio.end(), 1.0);
    for (const auto& step : r.steps) {
      for (std::size_t k = 0; k < ratio.size(); ++k) {
        ratio[k] *= step.q[k] / step.q_alpha;
      }
    }
    for (std::size_t k = 0; k < ratio.size(); ++k) {
      value -= beta[k] * (ratio[k] - 1.0);
    }
    out.push_back(value);
  }
  return out;
}

EstimateReport ordinary_cv_estimate(std::span<const TestRecord> records, std::span<const double> beta,
                                    double confidence) {
  return summarize(ordinary_cv_contributions(records, beta), confidence);
}

std::optional<double> relative_half_width(const EstimateReport& report) {
  if (report.mean == 0.0) {
    return std::nullopt;
  }
  return report.half_width / report.mean;
}

}  // namespace scvsafe
