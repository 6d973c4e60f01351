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
#include <limits>

#include "scvsafe/nade.hpp"

namespace scvsafe {
namespace {

// Rollout without any pruning: one step with the action, then the horizon
// with zero BV acceleration.
bool brute_force_crash(const SurrogateSpec& sm, OvertakingState s, const BvAction& action) {
  if (action.kind == BvAction::Kind::accelerate && s.bv_lane == Lane::left) return false;
  if (action.kind == BvAction::Kind::cut_in && !cut_in_feasible(s)) return false;
  s = step_dynamics(s, 0.0, action, av_acceleration(sm.driver, s), 0.1);
  if (is_crash(s)) return true;
  for (int k = 0; k < sm.challenge_horizon; ++k) {
    s = step_dynamics(s, 0.0, BvAction::accelerate(0.0), av_acceleration(sm.driver, s), 0.1);
    if (is_crash(s)) return true;
  }
  return false;
}

NddModel flat_cut_in_ndd(double p_cut) {
  SyntheticNddOptions o;
  o.cut_in_base = p_cut;
  o.cut_in_urgency_gain = 0.0;
  o.cut_in_min_gap = 0.0;
  return synthetic_ndd(o);
}

TEST(ManeuverChallenge, PruneAgreesWithBruteForce) {
  const auto ndd = synthetic_ndd();
  const auto sms = default_surrogates();
  Rng rng(12);
  int positives = 0;
  for (int i = 0; i < 400; ++i) {
    OvertakingState s;
    s.v_bv = rng.uniform(5.0, 40.0);
    s.r1 = 30.0;
    s.r2 = rng.uniform(5.5, 60.0);
    s.r2_dot = rng.uniform(-20.0, 5.0);
    s.bv_lane = rng.uniform() < 0.5 ? Lane::left : Lane::right;
    for (const auto& sm : sms) {
      const auto mask = challenge_mask(sm, s, ndd, {});
      for (std::size_t a = 0; a <= ndd.accel_grid.size(); ++a) {
        const bool want = brute_force_crash(sm, s, BvAction::from_index(ndd, a));
        ASSERT_EQ(((mask >> a) & 1U) != 0, want) << "sm " << sm.id << " action " << a << " state " << i;
        EXPECT_EQ(maneuver_challenge(sm, s, BvAction::from_index(ndd, a)), want ? 1.0 : 0.0);
        positives += want;
      }
    }
  }
  EXPECT_GT(positives, 100);
}

TEST(ManeuverChallenge, LeftLaneAccelerationIsHarmless) {
  const auto sm = default_surrogates().front();
  OvertakingState s{20.0, 30.0, 0.0, 6.0, -15.0, Lane::left, 0};
  EXPECT_EQ(maneuver_challenge(sm, s, BvAction::accelerate(-4.0)), 0.0);
  EXPECT_EQ(maneuver_challenge(sm, s, BvAction::cut_in()), 1.0);
  s.r2 = 95.0;
  s.r2_dot = -5.0;
  EXPECT_EQ(maneuver_challenge(sm, s, BvAction::cut_in()), 0.0);
}

TEST(ImportanceDistribution, HandEvaluatedCriticalFixture) {
  // Only the cut-in (p = 0.1) is challenging, so each component puts
  // 0.9 * 1 + 0.1 * 0.1 on it.
  const auto ndd = flat_cut_in_ndd(0.1);
  OvertakingState s{20.0, 30.0, 0.0, 10.0, -10.0, Lane::left, 0};
  NadeOptions o;
  const auto d = importance_distribution(s, ndd, o);
  ASSERT_TRUE(d.is_critical);
  EXPECT_NEAR(d.criticality, 0.1, 1e-15);
  for (const auto& q : d.per_sm) EXPECT_NEAR(q.back(), 0.91, 1e-12);
  EXPECT_NEAR(d.mixture.back(), 0.91, 1e-12);
  EXPECT_NEAR(d.mixture[0], 0.1 * d.naturalistic[0], 1e-15);
}

TEST(ImportanceDistribution, FullDefensiveMixingIsNaturalistic) {
  const auto ndd = flat_cut_in_ndd(0.1);
  OvertakingState s{20.0, 30.0, 0.0, 10.0, -10.0, Lane::left, 0};
  NadeOptions o;
  o.epsilon = 1.0;
  const auto d = importance_distribution(s, ndd, o);
  for (const auto& q : d.per_sm) {
    for (std::size_t a = 0; a < q.size(); ++a) EXPECT_NEAR(q[a], d.naturalistic[a], 1e-15);
  }
}

TEST(ImportanceDistribution, NonCriticalStateKeepsNaturalisticBehaviour) {
  const auto ndd = synthetic_ndd();
  OvertakingState s{30.0, 30.0, 0.0, 95.0, -5.0, Lane::left, 0};
  const auto d = importance_distribution(s, ndd, NadeOptions{});
  EXPECT_FALSE(d.is_critical);
  EXPECT_EQ(d.mixture, d.naturalistic);
  for (const auto& q : d.per_sm) EXPECT_EQ(q, d.naturalistic);
}

TEST(ImportanceDistributionProperty, NormalisedMixtureWithSupport) {
  const auto ndd = synthetic_ndd();
  Rng rng(44);
  NadeOptions o;
  o.alpha = {0.5, 0.3, 0.2};
  int critical = 0;
  for (int i = 0; i < 300; ++i) {
    OvertakingState s;
    s.v_bv = rng.uniform(10.0, 40.0);
    s.r1 = rng.uniform(5.0, 100.0);
    s.r1_dot = rng.uniform(-5.0, 5.0);
    s.r2 = rng.uniform(5.5, 50.0);
    s.r2_dot = rng.uniform(-15.0, 2.0);
    s.bv_lane = rng.uniform() < 0.6 ? Lane::left : Lane::right;
    const auto d = importance_distribution(s, ndd, o);
    critical += d.is_critical;
    EXPECT_EQ(d.is_critical, d.criticality > o.criticality_threshold);
    double total = 0.0;
    for (std::size_t a = 0; a < d.mixture.size(); ++a) {
      double mix = 0.0;
      for (std::size_t j = 0; j < 3; ++j) mix += o.alpha[j] * d.per_sm[j][a];
      EXPECT_NEAR(d.mixture[a], mix, 1e-12);
      if (d.naturalistic[a] > 0.0) EXPECT_GE(d.mixture[a], o.epsilon * d.naturalistic[a] * (1 - 1e-12));
      total += d.mixture[a];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    for (const auto& q : d.per_sm) {
      double sq = 0.0;
      for (double v : q) sq += v;
      EXPECT_NEAR(sq, 1.0, 1e-9);
    }
  }
  EXPECT_GT(critical, 20);
}

TEST(ChallengeCache, StoresTheBucketCentreMask) {
  const auto ndd = synthetic_ndd();
  const auto sms = default_surrogates();
  ChallengeCache cache;
  OvertakingState s{23.3, 30.0, 0.0, 14.2, -8.7, Lane::right, 0};
  const auto first = cache.mask(1, sms[1], s, ndd, {});
  OvertakingState centre = s;
  centre.v_bv = 23.25;
  centre.r2 = 14.25;
  centre.r2_dot = -8.75;
  centre.r1_dot = 0.0;
  EXPECT_EQ(first, challenge_mask(sms[1], centre, ndd, {}));
  OvertakingState nearby = s;
  nearby.v_bv = 23.4;
  nearby.r2 = 14.1;
  EXPECT_EQ(cache.mask(1, sms[1], nearby, ndd, {}), first);
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(NadeEpisode, InfiniteThresholdReproducesNde) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0);
  NadeOptions o;
  o.criticality_threshold = std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng a = Rng::for_stream(8, i);
    Rng b = Rng::for_stream(8, i);
    const auto nde = run_nde_episode(a, ndd, av, {}, true);
    const auto nade = run_nade_episode(b, ndd, o, av, {}, nullptr, true);
    ASSERT_EQ(nde.crash, nade.crash);
    ASSERT_EQ(nde.duration_steps, nade.duration_steps);
    ASSERT_EQ(nade.test_record.num_control_steps, 0u);
    ASSERT_EQ(nade.test_record.weight, 1.0);
    for (std::size_t k = 0; k < nde.trajectory->size(); ++k) {
      ASSERT_EQ((*nde.trajectory)[k].state, (*nade.trajectory)[k].state);
      ASSERT_EQ((*nde.trajectory)[k].action, (*nade.trajectory)[k].action);
    }
  }
}

TEST(NadeEpisode, RecordsAreConsistent) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0);
  NadeOptions o;
  ChallengeCache cache;
  std::size_t with_steps = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    Rng rng = Rng::for_stream(9, i);
    const auto e = run_nade_episode(rng, ndd, o, av, {}, &cache);
    EXPECT_NO_THROW(validate_record(e.test_record, o.alpha, 1e-12));
    EXPECT_EQ(e.test_record.crash_prob, e.crash ? 1.0 : 0.0);
    for (const auto& st : e.test_record.steps) EXPECT_GE(st.q_alpha, o.epsilon * st.p * (1 - 1e-12));
    with_steps += e.test_record.num_control_steps > 0;
  }
  EXPECT_GT(with_steps, 0u);
}

TEST(NadeEpisode, CacheDoesNotChangeTheRun) {
  const auto ndd = synthetic_ndd();
  const auto av = DriverParams::idm(2.0);
  NadeOptions o;
  ChallengeCache shared;
  for (std::uint64_t i = 0; i < 100; ++i) {
    ChallengeCache fresh;
    Rng a = Rng::for_stream(10, i);
    Rng b = Rng::for_stream(10, i);
    const auto x = run_nade_episode(a, ndd, o, av, {}, &shared);
    const auto y = run_nade_episode(b, ndd, o, av, {}, &fresh);
    EXPECT_EQ(x.test_record, y.test_record);
  }
}

TEST(NadeOptions, ValidationMessages) {
  EXPECT_TRUE(validate(NadeOptions{}).empty());
  NadeOptions o;
  o.alpha = {0.5, 0.5};
  EXPECT_FALSE(validate(o).empty());
  o = NadeOptions{};
  o.alpha = {0.5, 0.5, 0.5};
  EXPECT_FALSE(validate(o).empty());
  o = NadeOptions{};
  o.epsilon = 1.5;
  EXPECT_FALSE(validate(o).empty());
  o = NadeOptions{};
  o.surrogates[2].id = 7;
  EXPECT_FALSE(validate(o).empty());
}

TEST(ColumnCount, ExponentAndMagnitude) {
  const auto c = column_count(3, 201);
  EXPECT_EQ(c.exponent, 203u);
  EXPECT_NEAR(c.log10_value, 203.0 * std::log10(3.0), 1e-12);
  EXPECT_EQ(c.to_string().rfind("3^203", 0), 0u);
  EXPECT_NE(c.to_string().find("e+96"), std::string::npos);
}

}  // namespace
}  // namespace scvsafe
