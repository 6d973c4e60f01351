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

#include <cmath>
#include <sstream>
#include <string>

#include "scvsafe/traffic_sim.hpp"

namespace scvsafe {
namespace {

TEST(Integrate, ConstantAcceleration) {
  const auto m = integrate(10.0, 2.0, 0.1);
  EXPECT_NEAR(m.displacement, 1.01, 1e-15);
  EXPECT_NEAR(m.speed, 10.2, 1e-15);
}

TEST(Integrate, StopsInsideTheStep) {
  const auto m = integrate(0.2, -4.0, 0.1);
  EXPECT_EQ(m.speed, 0.0);
  EXPECT_NEAR(m.displacement, 0.005, 1e-15);
  const auto still = integrate(0.0, -3.0, 0.1);
  EXPECT_EQ(still.speed, 0.0);
  EXPECT_EQ(still.displacement, 0.0);
}

TEST(StepDynamics, RelativeStateUpdate) {
  OvertakingState s{20.0, 30.0, 1.0, 40.0, -5.0, Lane::left, 7};
  const auto n = step_dynamics(s, 0.0, BvAction::accelerate(1.0), -1.0, 0.1);
  // LV 21 m/s constant, BV 20 -> 20.1, AV 25 -> 24.9.
  EXPECT_NEAR(n.v_bv, 20.1, 1e-12);
  EXPECT_NEAR(n.r1, 30.0 + 2.1 - 2.005, 1e-12);
  EXPECT_NEAR(n.r1_dot, 21.0 - 20.1, 1e-12);
  EXPECT_NEAR(n.r2, 40.0 + 2.005 - 2.495, 1e-12);
  EXPECT_NEAR(n.r2_dot, 20.1 - 24.9, 1e-12);
  EXPECT_EQ(n.bv_lane, Lane::left);
  EXPECT_EQ(n.t, 8);
}

TEST(StepDynamics, CutInFlipsLaneAndHoldsSpeed) {
  OvertakingState s{20.0, 30.0, 0.0, 12.0, -5.0, Lane::left, 0};
  const auto n = step_dynamics(s, 0.0, BvAction::cut_in(), 0.0, 0.1);
  EXPECT_EQ(n.bv_lane, Lane::right);
  EXPECT_DOUBLE_EQ(n.v_bv, 20.0);
  EXPECT_NEAR(n.r2, 12.0 - 0.5, 1e-12);
}

TEST(Crash, OnlyInTheAvLane) {
  OvertakingState s{20.0, 30.0, 0.0, 4.0, 0.0, Lane::left, 0};
  EXPECT_FALSE(is_crash(s));
  s.bv_lane = Lane::right;
  EXPECT_TRUE(is_crash(s));
  s.r2 = 5.0;
  EXPECT_TRUE(is_crash(s));
  s.r2 = 5.01;
  EXPECT_FALSE(is_crash(s));
}

TEST(CutIn, FeasibleOnlyFromTheLeftLaneAhead) {
  OvertakingState s{20.0, 30.0, 0.0, 10.0, 0.0, Lane::left, 0};
  EXPECT_TRUE(cut_in_feasible(s));
  s.r2 = -1.0;
  EXPECT_FALSE(cut_in_feasible(s));
  s.r2 = 10.0;
  s.bv_lane = Lane::right;
  EXPECT_FALSE(cut_in_feasible(s));
  const auto d = nde_action_distribution(synthetic_ndd(), s);
  EXPECT_EQ(d.back(), 0.0);
}

TEST(InitialState, RangesAndRandomConsumption) {
  const auto ndd = synthetic_ndd();
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng rng(seed);
    const auto s = sample_initial_state(ndd, rng);
    ASSERT_GE(s.v_bv, 10.0);
    ASSERT_LT(s.v_bv, 40.0);
    ASSERT_GE(s.r2, 20.0);
    ASSERT_LT(s.r2, 100.0);
    ASSERT_GE(s.r2_dot, -10.0);
    ASSERT_LT(s.r2_dot, -5.0);
    ASSERT_GE(s.v_lv(), 0.0);
    EXPECT_EQ(s.bv_lane, Lane::left);
    EXPECT_EQ(s.t, 0);
    if (seed < 20) {
      Rng ref(seed);
      for (int i = 0; i < 8; ++i) (void)ref.uniform();
      EXPECT_EQ(rng.uniform(), ref.uniform());
    }
  }
}

TEST(AvAcceleration, FreeThenFollowing) {
  const auto av = DriverParams::idm(2.0);
  OvertakingState s{20.0, 30.0, 0.0, 25.0, -5.0, Lane::left, 0};
  EXPECT_DOUBLE_EQ(av_acceleration(av, s), free_acceleration(av, 25.0));
  s.bv_lane = Lane::right;
  EXPECT_DOUBLE_EQ(av_acceleration(av, s), car_following_acceleration(av, 25.0, 20.0, 5.0));
}

TEST(NdeEpisode, DeterministicUnderMatchedSeeds) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0);
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng a = Rng::for_stream(3, i);
    Rng b = Rng::for_stream(3, i);
    const auto ea = run_nde_episode(a, ndd, av);
    const auto eb = run_nde_episode(b, ndd, av);
    EXPECT_EQ(ea.crash, eb.crash);
    EXPECT_EQ(ea.duration_steps, eb.duration_steps);
    EXPECT_TRUE(ea.test_record.steps.empty());
    if (!ea.crash) EXPECT_EQ(ea.duration_steps, 201);
  }
}

TEST(NdeEpisode, TraceIsConsistentWithTheDynamics) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0);
  Rng rng(99);
  const auto e = run_nde_episode(rng, ndd, av, {}, true);
  ASSERT_TRUE(e.trajectory.has_value());
  const auto& rows = *e.trajectory;
  ASSERT_EQ(static_cast<int>(rows.size()), e.duration_steps);
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const auto next = step_dynamics(rows[k].state, 0.0, BvAction::from_index(ndd, rows[k].action), rows[k].av_accel, 0.1);
    EXPECT_EQ(next, rows[k + 1].state);
  }
  std::ostringstream csv;
  write_trace_csv(csv, ndd, rows);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,v_bv,r1,r1_dot,r2,r2_dot,bv_lane,bv_action,av_accel");
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, rows.size());
}

TEST(NdeEpisode, NoCutInMeansNoCrash) {
  SyntheticNddOptions o;
  o.cut_in_base = 0.0;
  const auto ndd = synthetic_ndd(o);
  const auto av = DriverParams::idm(2.0);
  for (std::uint64_t i = 0; i < 200; ++i) {
    Rng rng = Rng::for_stream(4, i);
    EXPECT_FALSE(run_nde_episode(rng, ndd, av).crash);
  }
}

TEST(NdeEpisode, ConstantLeaderModelIsOptional) {
  SimConfig cfg;
  cfg.lv_model = DriverParams::idm(1.0, "LV");
  OvertakingState s{20.0, 30.0, 2.0, 25.0, -5.0, Lane::left, 0};
  EXPECT_DOUBLE_EQ(lv_acceleration(SimConfig{}, s), 0.0);
  EXPECT_DOUBLE_EQ(lv_acceleration(cfg, s), free_acceleration(*cfg.lv_model, 22.0));
}

TEST(BvAction, IndexLayout) {
  const auto ndd = synthetic_ndd();
  EXPECT_EQ(BvAction::from_index(ndd, 0).accel, -4.0);
  EXPECT_EQ(BvAction::from_index(ndd, 31).kind, BvAction::Kind::cut_in);
  EXPECT_ANY_THROW(BvAction::from_index(ndd, 32));
}

}  // namespace
}  // namespace scvsafe
