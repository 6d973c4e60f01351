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

#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scvsafe/compare.hpp"
#include "scvsafe/estimators.hpp"
#include "test_support.hpp"

namespace scvsafe {
namespace {

BootstrapReport report_of(const std::vector<std::optional<std::size_t>>& rnots) {
  BootstrapReport r;
  for (auto v : rnots) {
    ShuffleOutcome s;
    s.rnot = v;
    r.shuffles.push_back(s);
  }
  return r;
}

TEST(Aar, PairsShufflesReachedByBoth) {
  const auto a = report_of({100, 200, std::nullopt, 50});
  const auto b = report_of({1000, std::nullopt, 300, 500});
  // Shuffles 0 and 3 are paired: (1000 + 500) / (100 + 50).
  EXPECT_NEAR(*average_acceleration_ratio(a, b), 10.0, 1e-12);
  EXPECT_NEAR(*average_acceleration_ratio(b, a), 0.1, 1e-12);
  EXPECT_FALSE(average_acceleration_ratio(report_of({std::nullopt}), report_of({5})).has_value());
}

TEST(Compare, EntriesAndAarMatrix) {
  std::vector<RecordSet> sets = {{"nade", testing::random_records(600, 3, 3, 41)}};
  CompareOptions o;
  o.shuffles = 6;
  const auto report = compare(sets, o);
  ASSERT_EQ(report.entries.size(), 2u);
  EXPECT_EQ(report.entries[0].estimator, EstimatorKind::importance);
  EXPECT_EQ(report.entries[1].estimator, EstimatorKind::scv);
  EXPECT_EQ(report.entries[1].name(), "nade/scv");
  EXPECT_EQ(report.aar[1][0], average_acceleration_ratio(report.entries[1].bootstrap, report.entries[0].bootstrap));
  EXPECT_NE(report.render_table().find("AAR"), std::string::npos);
  const auto j = nlohmann::json::parse(report.to_json());
  EXPECT_EQ(j.at("entries").size(), 2u);
}

TEST(Compare, CrudeForNaturalisticSets) {
  std::vector<TestRecord> nde;
  for (int i = 0; i < 400; ++i) nde.push_back(testing::make_record(i, i % 20 == 0 ? 1.0 : 0.0, {}));
  std::vector<RecordSet> sets = {{"nde", nde}, {"nade", testing::random_records(300, 3, 2, 42)}};
  CompareOptions o;
  o.shuffles = 4;
  const auto report = compare(sets, o);
  ASSERT_EQ(report.entries.size(), 3u);
  EXPECT_EQ(report.entries[0].estimator, EstimatorKind::crude);
}

TEST(Compare, NeedsTwoEntries) {
  std::vector<TestRecord> nde(10, testing::make_record(0, 0.0, {}));
  std::vector<RecordSet> one = {{"nde", nde}};
  EXPECT_THROW(compare(one), std::invalid_argument);
  std::vector<RecordSet> empty = {{"a", {}}, {"b", nde}};
  EXPECT_THROW(compare(empty), std::invalid_argument);
}

TEST(ConvergenceCsv, RowsMatchPrefixEstimates) {
  const auto recs = testing::random_records(500, 3, 3, 43);
  for (auto kind : {EstimatorKind::importance, EstimatorKind::scv}) {
    std::ostringstream out;
    emit_convergence_csv(out, recs, kind);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "n,mean,variance,rhw");
    const auto counts = log_spaced_counts(recs.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
      ASSERT_LT(row, counts.size());
      std::istringstream fields(line);
      std::string n_s, mean_s;
      std::getline(fields, n_s, ',');
      std::getline(fields, mean_s, ',');
      EXPECT_EQ(std::stoul(n_s), counts[row]);
      const std::vector<TestRecord> prefix(recs.begin(), recs.begin() + static_cast<std::ptrdiff_t>(counts[row]));
      const double want = kind == EstimatorKind::scv ? scv_estimate(prefix).report.mean
                                                      : importance_weighted_estimate(prefix).mean;
      EXPECT_NEAR(std::stod(mean_s), want, 1e-12 * std::max(1.0, std::abs(want)));
      ++row;
    }
    EXPECT_EQ(row, counts.size());
  }
}

}  // namespace
}  // namespace scvsafe
