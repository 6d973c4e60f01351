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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "scvsafe/convergence.hpp"
#include "scvsafe/estimators.hpp"
#include "scvsafe/records.hpp"

namespace scvsafe {

struct RecordSet {
  std::string label;
  std::vector<TestRecord> records;
};

struct CompareOptions {
  std::size_t shuffles = kDefaultShuffles;
  double rhw_threshold = kDefaultRhwThreshold;
  double confidence = kDefaultConfidence;
  std::uint64_t seed = 0;
  /// Empty: crude for sets without critical steps, importance and scv otherwise.
  std::vector<EstimatorKind> estimators;
  ScvOptions scv;
  std::size_t workers = 1;
};

struct ComparisonEntry {
  std::string label;
  EstimatorKind estimator = EstimatorKind::importance;
  EstimateReport estimate;
  BootstrapReport bootstrap;

  [[nodiscard]] std::string name() const;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  /// aar[a][b] is the AAR of entry a over entry b; empty when no shuffle
  /// reached the threshold under both.
  std::vector<std::vector<std::optional<double>>> aar;

  [[nodiscard]] std::string render_table() const;
  [[nodiscard]] std::string to_json() const;
};

/// mean RNoT(b) / mean RNoT(a) over the shuffle indices where both reached
/// the threshold.
std::optional<double> average_acceleration_ratio(const BootstrapReport& a, const BootstrapReport& b);

/// Bootstraps every (set, estimator) entry with the same shuffle seeds. Needs
/// at least two entries.
ComparisonReport compare(std::span<const RecordSet> sets, const CompareOptions& options = {});

/// n,mean,variance,rhw at log-spaced prefix counts (ending at the full n),
/// each row recomputed from scratch on the first n records.
void emit_convergence_csv(std::ostream& out, std::span<const TestRecord> records, EstimatorKind estimator,
                          double confidence = kDefaultConfidence, const ScvOptions& scv = {});

}  // namespace scvsafe
