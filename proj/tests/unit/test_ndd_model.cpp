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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "scvsafe/ndd_model.hpp"
#include "scvsafe/traffic_sim.hpp"

namespace scvsafe {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(NddModel, SyntheticModelIsValid) {
  const auto m = synthetic_ndd();
  EXPECT_TRUE(validate(m).empty());
  EXPECT_EQ(m.accel_grid.size(), 31u);
  EXPECT_DOUBLE_EQ(m.accel_grid.front(), -4.0);
  EXPECT_DOUBLE_EQ(m.accel_grid.back(), 2.0);
  EXPECT_EQ(m.cf_probs.size(), 24u * 20u);
  EXPECT_EQ(m.free_probs.size(), 25u);
  EXPECT_EQ(m.cut_probs.size(), 60u * 30u);
}

// Golden distributions were generated by tests/data/gen_ndd_golden.py from
// the model definition; they are frozen so any drift in the tables shows up.
TEST(NddModel, ActionDistributionMatchesGolden) {
  const auto golden = nlohmann::json::parse(read_file(std::filesystem::path(SCVSAFE_TEST_DATA_DIR) / "ndd_action_golden.json"));
  const auto m = synthetic_ndd();
  const auto grid = golden.at("accel_grid").get<std::vector<double>>();
  ASSERT_EQ(grid.size(), m.accel_grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(grid[k], m.accel_grid[k], 1e-12);
  for (const auto& c : golden.at("cases")) {
    const auto& st = c.at("state");
    OvertakingState s;
    s.v_bv = st.at("v_bv");
    s.r1 = st.at("r1");
    s.r1_dot = st.at("r1_dot");
    s.r2 = st.at("r2");
    s.r2_dot = st.at("r2_dot");
    s.bv_lane = st.at("lane") == "left" ? Lane::left : Lane::right;
    const auto want = c.at("distribution").get<std::vector<double>>();
    const auto got = nde_action_distribution(m, s);
    ASSERT_EQ(got.size(), want.size());
    double total = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_NEAR(got[k], want[k], 1e-12) << "state " << st.dump() << " action " << k;
      total += got[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(NddModel, GapAcceptanceAndUrgency) {
  const auto m = synthetic_ndd();
  EXPECT_EQ(m.cut_in_probability(5.0, -10.0), 0.0);
  EXPECT_GT(m.cut_in_probability(10.0, -10.0), m.cut_in_probability(60.0, -10.0));
  EXPECT_GT(m.cut_in_probability(30.0, -15.0), m.cut_in_probability(30.0, -5.0));
  EXPECT_LE(m.cut_in_probability(8.5, -19.9), 0.5);
}

TEST(BinIndex, ClampsOutOfRange) {
  const std::vector<double> edges = {0.0, 1.0, 2.0, 3.0};
  EXPECT_EQ(bin_index(edges, -5.0), 0u);
  EXPECT_EQ(bin_index(edges, 0.0), 0u);
  EXPECT_EQ(bin_index(edges, 1.0), 1u);
  EXPECT_EQ(bin_index(edges, 2.999), 2u);
  EXPECT_EQ(bin_index(edges, 3.0), 2u);
  EXPECT_EQ(bin_index(edges, 99.0), 2u);
}

TEST(BinnedDistribution, SamplesFollowTheBins) {
  BinnedDistribution d{{0.0, 1.0, 3.0}, {0.25, 0.75}};
  Rng rng(8);
  int in_second = 0;
  for (int i = 0; i < 40000; ++i) {
    const double x = d.sample(rng);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 3.0);
    if (x >= 1.0) ++in_second;
  }
  EXPECT_NEAR(in_second / 40000.0, 0.75, 0.01);
}

TEST(NddModel, JsonRoundTripIsExact) {
  const auto m = synthetic_ndd();
  EXPECT_EQ(ndd_from_json(to_json(m)), m);
  const auto path = std::filesystem::temp_directory_path() / "scvsafe_ndd_roundtrip.json";
  save_ndd(m, path);
  EXPECT_EQ(load_ndd(path), m);
  std::filesystem::remove(path);
}

TEST(NddModel, RejectsMalformedTables) {
  auto j = nlohmann::json::parse(to_json(synthetic_ndd()));
  j["free_driving"]["probs"][0][0] = 0.9;
  EXPECT_THROW(ndd_from_json(j.dump()), std::invalid_argument);
  EXPECT_THROW(ndd_from_json("{}"), std::invalid_argument);
  EXPECT_THROW(load_ndd("/nonexistent/ndd.json"), std::runtime_error);
}

TEST(NddModel, OptionsChangeTheCutInTable) {
  SyntheticNddOptions o;
  o.cut_in_base = 1e-3;
  o.cut_in_urgency_gain = 0.0;
  const auto m = synthetic_ndd(o);
  EXPECT_DOUBLE_EQ(m.cut_in_probability(50.0, -5.0), 1e-3);
  EXPECT_TRUE(validate(m).empty());
}

}  // namespace
}  // namespace scvsafe
