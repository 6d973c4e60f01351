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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scvsafe/records.hpp"
#include "scvsafe/scv.hpp"

namespace scvsafe {

inline constexpr double kDefaultRhwThreshold = 0.3;
inline constexpr std::size_t kDefaultShuffles = 200;
inline constexpr std::size_t kPointsPerDecade = 25;

enum class EstimatorKind { crude, importance, scv };

std::string_view to_string(EstimatorKind kind);
/// Accepts "crude", "is" / "importance", "scv".
EstimatorKind parse_estimator(std::string_view name);

/// Smallest n whose running estimate over the first n contributions has a
/// positive mean and RHW <= threshold (first crossing). Empty if never reached.
std::optional<std::size_t> required_num_tests(std::span<const double> contributions,
                                              double rhw_threshold = kDefaultRhwThreshold,
                                              double confidence = kDefaultConfidence);

/// 1..n at kPointsPerDecade log-spaced points (deduplicated), always ending at n.
std::vector<std::size_t> log_spaced_counts(std::size_t n, std::size_t per_decade = kPointsPerDecade);

/// Seeded Fisher-Yates permutation of 0..n-1; the stream depends only on
/// (seed, shuffle_index).
std::vector<std::size_t> bootstrap_permutation(std::size_t n, std::uint64_t seed,
                                               std::size_t shuffle_index);

struct BootstrapOptions {
  std::size_t num_shuffles = kDefaultShuffles;
  double rhw_threshold = kDefaultRhwThreshold;
  std::uint64_t seed = 0;
  EstimatorKind estimator = EstimatorKind::importance;
  double confidence = kDefaultConfidence;
  ScvOptions scv;
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 1;
};

struct ShuffleOutcome {
  /// First n with RHW <= threshold, if reached.
  std::optional<std::size_t> rnot;
  /// n at which the smallest RHW was observed (the fallback when unreached).
  std::size_t best_n = 0;
  double best_rhw = 0.0;
};

struct BootstrapReport {
  std::vector<ShuffleOutcome> shuffles;
  /// Mean RNoT over shuffles that reached the threshold.
  std::optional<double> mean_rnot;
  std::size_t unreached = 0;
  /// Mean where unreached shuffles contribute their best_n instead.
  std::optional<double> mean_rnot_with_fallback;
};

/// RNoT along one ordering of the records. crude/importance scan every
/// prefix; scv re-fits at the log-spaced prefix counts.
ShuffleOutcome rnot_along(std::span<const TestRecord> records, std::span<const std::size_t> order,
                          const BootstrapOptions& options);

BootstrapReport bootstrap_rnot(std::span<const TestRecord> records, const BootstrapOptions& options);

}  // namespace scvsafe
