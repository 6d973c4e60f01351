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

#include "scvsafe/compare.hpp"

#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace scvsafe {
namespace {

EstimateReport full_estimate(std::span<const TestRecord> records, EstimatorKind kind, double confidence,
                             const ScvOptions& scv) {
  switch (kind) {
    case EstimatorKind::crude:
      return crude_monte_carlo(records, confidence);
    case EstimatorKind::importance:
      return importance_weighted_estimate(records, confidence);
    case EstimatorKind::scv: {
      ScvOptions o = scv;
      o.confidence = confidence;
      return scv_estimate(records, o).report;
    }
  }
  throw std::logic_error("unknown estimator");
}

std::string fmt(double x, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

}  // namespace

std::string ComparisonEntry::name() const { return label + "/" + std::string(to_string(estimator)); }

std::optional<double> average_acceleration_ratio(const BootstrapReport& a, const BootstrapReport& b) {
  const std::size_t n = std::min(a.shuffles.size(), b.shuffles.size());
  double sum_a = 0.0;
  double sum_b = 0.0;
  std::size_t paired = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (a.shuffles[s].rnot && b.shuffles[s].rnot) {
      sum_a += static_cast<double>(*a.shuffles[s].rnot);
      sum_b += static_cast<double>(*b.shuffles[s].rnot);
      ++paired;
    }
  }
  if (paired == 0) return std::nullopt;
  return sum_b / sum_a;
}

ComparisonReport compare(std::span<const RecordSet> sets, const CompareOptions& options) {
  ComparisonReport report;
  for (const auto& set : sets) {
    if (set.records.empty()) throw std::invalid_argument("record set \"" + set.label + "\" is empty");
    std::vector<EstimatorKind> kinds = options.estimators;
    if (kinds.empty()) {
      if (component_count(set.records) == 0) {
        kinds = {EstimatorKind::crude};
      } else {
        kinds = {EstimatorKind::importance, EstimatorKind::scv};
      }
    }
    for (const auto kind : kinds) {
      ComparisonEntry e;
      e.label = set.label;
      e.estimator = kind;
      e.estimate = full_estimate(set.records, kind, options.confidence, options.scv);
      BootstrapOptions b;
      b.num_shuffles = options.shuffles;
      b.rhw_threshold = options.rhw_threshold;
      b.seed = options.seed;
      b.estimator = kind;
      b.confidence = options.confidence;
      b.scv = options.scv;
      b.workers = options.workers;
      e.bootstrap = bootstrap_rnot(set.records, b);
      report.entries.push_back(std::move(e));
    }
  }
  if (report.entries.size() < 2) throw std::invalid_argument("compare needs at least two record sets or estimators");
  const std::size_t m = report.entries.size();
  report.aar.assign(m, std::vector<std::optional<double>>(m));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      report.aar[a][b] = average_acceleration_ratio(report.entries[a].bootstrap, report.entries[b].bootstrap);
    }
  }
  return report;
}

std::string ComparisonReport::render_table() const {
  std::ostringstream out;
  out << "estimator                  mean        rhw      mean RNoT   unreached\n";
  for (const auto& e : entries) {
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %10.4g %10s %12s %6zu/%zu\n", e.name().c_str(), e.estimate.mean,
                  e.estimate.rhw ? fmt(*e.estimate.rhw, "%.3f").c_str() : "none",
                  e.bootstrap.mean_rnot ? fmt(*e.bootstrap.mean_rnot, "%.1f").c_str() : "none", e.bootstrap.unreached,
                  e.bootstrap.shuffles.size());
    out << line;
  }
  out << "\nAAR (row over column)\n";
  for (std::size_t a = 0; a < entries.size(); ++a) {
    for (std::size_t b = 0; b < entries.size(); ++b) {
      if (a == b) continue;
      out << "  " << entries[a].name() << " over " << entries[b].name() << ": "
          << (aar[a][b] ? fmt(*aar[a][b], "%.3f") : std::string("none")) << '\n';
    }
  }
  return out.str();
}

std::string ComparisonReport::to_json() const {
  nlohmann::ordered_json j;
  auto list = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json ej;
    ej["label"] = e.label;
    ej["estimator"] = std::string(to_string(e.estimator));
    ej["mean"] = e.estimate.mean;
    ej["variance"] = e.estimate.asymptotic_variance;
    ej["rhw"] = e.estimate.rhw ? nlohmann::ordered_json(*e.estimate.rhw) : nlohmann::ordered_json(nullptr);
    ej["mean_rnot"] = e.bootstrap.mean_rnot ? nlohmann::ordered_json(*e.bootstrap.mean_rnot)
                                            : nlohmann::ordered_json(nullptr);
    ej["unreached"] = e.bootstrap.unreached;
    auto rnots = nlohmann::ordered_json::array();
    for (const auto& s : e.bootstrap.shuffles) {
      rnots.push_back(s.rnot ? nlohmann::ordered_json(*s.rnot) : nlohmann::ordered_json(nullptr));
    }
    ej["rnot"] = std::move(rnots);
    list.push_back(std::move(ej));
  }
  j["entries"] = std::move(list);
  auto aar_json = nlohmann::ordered_json::array();
  for (const auto& row : aar) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& v : row) r.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
    aar_json.push_back(std::move(r));
  }
  j["aar"] = std::move(aar_json);
  return j.dump(2) + "\n";
}

void emit_convergence_csv(std::ostream& out, std::span<const TestRecord> records, EstimatorKind estimator,
                          double confidence, const ScvOptions& scv) {
  if (records.empty()) throw std::invalid_argument("convergence: no records");
  out << "n,mean,variance,rhw\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  std::vector<double> contributions;
  if (estimator == EstimatorKind::crude) {
    for (const auto& r : records) contributions.push_back(r.crash_prob);
  } else if (estimator == EstimatorKind::importance) {
    contributions = weighted_outcomes(records);
  }
  std::vector<ScvFeatures> features;
  std::size_t components = 0;
  ScvOptions opts = scv;
  opts.confidence = confidence;
  if (estimator == EstimatorKind::scv) {
    components = component_count(records);
    features = extract_scv_features(records, components, opts.max_control_steps);
  }
  for (const std::size_t n : log_spaced_counts(records.size())) {
    EstimateReport r;
    if (estimator == EstimatorKind::scv) {
      r = scv_estimate_features(features, components, opts, {}, n).report;
    } else {
      r = summarize(std::span<const double>(contributions).first(n), confidence);
    }
    out << n << ',' << r.mean << ',' << r.asymptotic_variance << ',';
    if (r.rhw) out << *r.rhw;
    out << '\n';
  }
}

}  // namespace scvsafe
