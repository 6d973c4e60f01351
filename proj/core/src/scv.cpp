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
#include "scvsafe/scv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace scvsafe {
namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    out *= base;
  }
  return out;
}

// Expands the row-major l x (J-1) ratio table into its lexicographic tensor product.
void expand_row(std::span<const double> ratios, std::size_t l, std::size_t width, double* out) {
  out[0] = 1.0;
  std::size_t len = 1;
  for (std::size_t step = 0; step < l; ++step) {
    const double* r = ratios.data() + step * width;
    // Walk backwards so the expansion can be done in place.
    for (std::size_t i = len; i-- > 0;) {
      const double base = out[i];
      for (std::size_t k = width; k-- > 0;) {
        out[i * width + k] = base * r[k];
      }
    }
    len *= width;
  }
}

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) {
    return 0.0;
  }
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

StratumFit fit_stratum(std::span<const ScvFeatures> features, std::span<const std::size_t> members,
                       std::size_t l, std::size_t components, std::size_t n_total,
                       const ScvOptions& options) {
  StratumFit out;
  out.l = l;
  out.n_l = members.size();
  const std::size_t width = components > 0 ? components - 1 : 0;
  out.d_l = scv_column_count(l, components);
  if (out.n_l == 0) {
    out.fit.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.d_l));
    return out;
  }

  const auto rows = static_cast<Eigen::Index>(out.n_l);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    y(i) = features[members[static_cast<std::size_t>(i)]].y;
  }

  const bool regress = l > 0 && out.d_l > 0 && !options.zero_coefficients &&
                       out.n_l >= options.min_regression_rows;
  if (!regress) {
    if (!y.allFinite()) {
      throw std::invalid_argument("invalid design: non-finite entries");
    }
    out.fit.intercept = y.mean();
    out.fit.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.d_l));
    out.fit.residuals = y.array() - out.fit.intercept;
    out.fit.rank = 0;
  } else {
    Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(out.d_l));
    std::vector<double> row(out.d_l);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto& f = features[members[static_cast<std::size_t>(i)]];
      if (f.ratios.size() < l * width) {
        throw std::invalid_argument("incomplete likelihood record");
      }
      expand_row(f.ratios, l, width, row.data());
      for (std::size_t c = 0; c < out.d_l; ++c) {
        design(i, static_cast<Eigen::Index>(c)) = row[c];
      }
    }
    center_columns(design);
    out.fit = fit_mlr_svd(y, design, options.rel_tol);
  }
  out.mu_hat = static_cast<double>(out.n_l) * out.fit.intercept / static_cast<double>(n_total);
  out.residual_variance = sample_variance(out.fit.residuals);
  return out;
}

ScvFeatures features_of(const TestRecord& record, std::size_t stratum, std::size_t components) {
  ScvFeatures f;
  f.y = record.crash_prob * record.likelihood_ratio();
  f.stratum = static_cast<std::uint32_t>(stratum);
  const std::size_t width = components > 0 ? components - 1 : 0;
  f.ratios.reserve(stratum * width);
  for (std::size_t s = 0; s < stratum; ++s) {
    const auto& step = record.steps.at(s);
    if (step.q.size() < width) {
      throw std::invalid_argument("incomplete likelihood record");
    }
    for (std::size_t k = 0; k < width; ++k) {
      f.ratios.push_back(step.q[k] / step.q_alpha);
    }
  }
  return f;
}

}  // namespace

StratifiedBatch stratify(std::span<const TestRecord> records, std::size_t max_control_steps) {
  if (max_control_steps < 1) {
    throw std::invalid_argument("stratify: max_control_steps must be >= 1");
  }
  StratifiedBatch batch;
  batch.records = records;
  batch.max_control_steps = max_control_steps;
  batch.strata.resize(max_control_steps + 1);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t l = std::min(records[i].num_control_steps, max_control_steps);
    batch.strata[l].push_back(i);
  }
  return batch;
}

std::size_t scv_column_count(std::size_t l, std::size_t components) {
  return ipow(components > 0 ? components - 1 : 0, l);
}

std::vector<double> scv_design_row(const TestRecord& record, std::size_t l, std::size_t components) {
  if (l == 0) {
    return {};
  }
  if (record.steps.size() < l) {
    throw std::invalid_argument("incomplete likelihood record");
  }
  const ScvFeatures f = features_of(record, l, components);
  std::vector<double> row(scv_column_count(l, components));
  if (!row.empty()) {
    expand_row(f.ratios, l, components - 1, row.data());
  }
  return row;
}

std::vector<ScvFeatures> extract_scv_features(std::span<const TestRecord> records,
                                              std::size_t components,
                                              std::size_t max_control_steps) {
  std::vector<ScvFeatures> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(features_of(r, std::min(r.num_control_steps, max_control_steps), components));
  }
  return out;
}

StratumFit estimate_stratum(std::span<const TestRecord> stratum_records, std::size_t l,
                            std::size_t components, std::size_t n_total, const ScvOptions& options) {
  std::vector<ScvFeatures> features;
  features.reserve(stratum_records.size());
  for (const auto& r : stratum_records) {
    features.push_back(features_of(r, l, components));
  }
  std::vector<std::size_t> members(features.size());
  std::iota(members.begin(), members.end(), std::size_t{0});
  return fit_stratum(features, members, l, components, n_total, options);
}

ScvResult scv_estimate_features(std::span<const ScvFeatures> features, std::size_t components,
                                const ScvOptions& options, std::span<const std::size_t> order,
                                std::size_t count) {
  const std::size_t available = order.empty() ? features.size() : order.size();
  const std::size_t n = std::min(count, available);
  if (n == 0) {
    throw std::invalid_argument("no samples");
  }
  auto index_at = [&](std::size_t k) { return order.empty() ? k : order[k]; };

  std::vector<std::vector<std::size_t>> strata(options.max_control_steps + 1);
  std::vector<std::vector<std::size_t>> positions(options.max_control_steps + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = index_at(k);
    const std::size_t l = std::min<std::size_t>(features[idx].stratum, options.max_control_steps);
    strata[l].push_back(idx);
    positions[l].push_back(k);
  }

  ScvResult result;
  result.adjusted.assign(n, 0.0);
  result.strata.reserve(strata.size());
  double total = 0.0;
  for (std::size_t l = 0; l < strata.size(); ++l) {
    StratumFit fit = fit_stratum(features, strata[l], l, components, n, options);
    for (std::size_t i = 0; i < positions[l].size(); ++i) {
      result.adjusted[positions[l][i]] =
          fit.fit.residuals(static_cast<Eigen::Index>(i)) + fit.fit.intercept;
    }
    total += fit.mu_hat;
    result.strata.push_back(std::move(fit));
  }

  result.report = summarize(result.adjusted, options.confidence);
  result.report.mean = total;
  result.report.rhw = relative_half_width(result.report);
  return result;
}

ScvResult scv_estimate(const StratifiedBatch& batch, std::size_t components, const ScvOptions& options) {
  ScvOptions opts = options;
  opts.max_control_steps = batch.max_control_steps;
  const auto features = extract_scv_features(batch.records, components, batch.max_control_steps);
  return scv_estimate_features(features, components, opts);
}

ScvResult scv_estimate(std::span<const TestRecord> records, const ScvOptions& options) {
  const std::size_t j = std::max<std::size_t>(1, component_count(records));
  return scv_estimate(stratify(records, options.max_control_steps), j, options);
}

void write_strata_csv(std::ostream& out, std::span<const StratumFit> strata) {
  out << "l,n_l,d_l,rank,mu_hat,residual_variance\n";
  const auto old_precision = out.precision(17);
  for (const auto& s : strata) {
    out << s.l << ',' << s.n_l << ',' << s.d_l << ',' << s.fit.rank << ',' << s.mu_hat << ','
        << s.residual_variance << '\n';
  }
  out.precision(old_precision);
}

}  // namespace scvsafe
