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

#include "scvsafe/nade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace scvsafe {
namespace {

// Upper bound on how much the gap can close over duration T when the AV
// accelerates at most kAccelMax and the BV decelerates at most rel_decel.
bool gap_unreachable(const OvertakingState& s, double duration, double extra_accel, double vehicle_length) {
  const double closing = std::max(0.0, -s.r2_dot);
  const double reach = closing * duration + 0.5 * (kAccelMax + extra_accel) * duration * duration;
  return s.r2 - vehicle_length > reach;
}

double rollout(const DriverParams& driver, OvertakingState s, const BvAction& action, int horizon,
               const SimConfig& config) {
  if (action.kind == BvAction::Kind::accelerate && s.bv_lane == Lane::left) return 0.0;
  if (action.kind == BvAction::Kind::cut_in && !cut_in_feasible(s)) return 0.0;
  const double av_a = av_acceleration(driver, s, config.vehicle_length);
  s = step_dynamics(s, 0.0, action, av_a, config.dt);
  if (is_crash(s, config.vehicle_length)) return 1.0;
  for (int k = 0; k < horizon; ++k) {
    if (gap_unreachable(s, (horizon - k) * config.dt, 0.0, config.vehicle_length)) return 0.0;
    s = step_dynamics(s, 0.0, BvAction::accelerate(0.0), av_acceleration(driver, s, config.vehicle_length),
                      config.dt);
    if (is_crash(s, config.vehicle_length)) return 1.0;
  }
  return 0.0;
}

std::int64_t bucket(double x) { return static_cast<std::int64_t>(std::floor(x / ChallengeCache::kResolution)); }

double bucket_centre(std::int64_t b) { return (static_cast<double>(b) + 0.5) * ChallengeCache::kResolution; }

}  // namespace

std::vector<SurrogateSpec> default_surrogates(int challenge_horizon) {
  return {SurrogateSpec{1, sm_one(), challenge_horizon}, SurrogateSpec{2, sm_two(), challenge_horizon},
          SurrogateSpec{3, sm_three(), challenge_horizon}};
}

std::vector<std::string> validate(const NadeOptions& o) {
  std::vector<std::string> issues;
  if (o.surrogates.empty()) issues.emplace_back("at least one surrogate model is required");
  if (o.surrogates.size() > 63) issues.emplace_back("at most 63 surrogate models are supported");
  for (std::size_t j = 0; j < o.surrogates.size(); ++j) {
    if (o.surrogates[j].id != static_cast<int>(j + 1)) issues.emplace_back("surrogate ids must be dense 1..J");
    if (o.surrogates[j].challenge_horizon < 0) issues.emplace_back("challenge horizon must be >= 0");
    for (auto& issue : validate(o.surrogates[j].driver)) issues.push_back(std::move(issue));
  }
  if (o.alpha.size() != o.surrogates.size()) {
    issues.push_back("alpha has " + std::to_string(o.alpha.size()) + " weights for " +
                     std::to_string(o.surrogates.size()) + " surrogates");
  }
  double sum = 0.0;
  for (double a : o.alpha) {
    if (!(a >= 0.0)) issues.emplace_back("alpha weights must be >= 0");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) issues.push_back("alpha weights sum to " + std::to_string(sum) + ", expected 1");
  if (!(o.epsilon >= 0.0 && o.epsilon <= 1.0)) issues.emplace_back("epsilon must lie in [0, 1]");
  if (std::isnan(o.criticality_threshold)) issues.emplace_back("criticality threshold is NaN");
  return issues;
}

double maneuver_challenge(const SurrogateSpec& sm, const OvertakingState& state, const BvAction& action,
                          const SimConfig& config) {
  return rollout(sm.driver, state, action, sm.challenge_horizon, config);
}

std::uint64_t challenge_mask(const SurrogateSpec& sm, const OvertakingState& state, const NddModel& ndd,
                             const SimConfig& config) {
  const std::size_t g = ndd.accel_grid.size();
  const double duration = (sm.challenge_horizon + 1) * config.dt;
  const double bv_decel = std::max(0.0, -*std::min_element(ndd.accel_grid.begin(), ndd.accel_grid.end()));
  std::uint64_t mask = 0;
  if (state.bv_lane == Lane::left) {
    if (cut_in_feasible(state) && !gap_unreachable(state, duration, 0.0, config.vehicle_length) &&
        rollout(sm.driver, state, BvAction::cut_in(), sm.challenge_horizon, config) > 0.0) {
      mask |= std::uint64_t{1} << g;
    }
    return mask;
  }
  if (gap_unreachable(state, duration, bv_decel, config.vehicle_length)) return 0;
  for (std::size_t k = 0; k < g; ++k) {
    if (rollout(sm.driver, state, BvAction::accelerate(ndd.accel_grid[k]), sm.challenge_horizon, config) > 0.0) {
      mask |= std::uint64_t{1} << k;
    }
  }
  return mask;
}

std::uint64_t ChallengeCache::mask(std::size_t sm_index, const SurrogateSpec& sm, const OvertakingState& state,
                                   const NddModel& ndd, const SimConfig& config) {
  const std::int64_t bv = bucket(state.v_bv);
  const std::int64_t r2 = bucket(state.r2);
  const std::int64_t rd = bucket(state.r2_dot);
  const bool in_range = bv >= 0 && bv < (1 << 12) && r2 >= -(1 << 19) && r2 < (1 << 19) && rd >= -(1 << 13) &&
                        rd < (1 << 13) && sm_index < 64;
  if (!in_range) return challenge_mask(sm, state, ndd, config);
  const std::uint64_t key = (static_cast<std::uint64_t>(sm_index) << 58) |
                            (static_cast<std::uint64_t>(state.bv_lane == Lane::right) << 57) |
                            (static_cast<std::uint64_t>(bv) << 45) |
                            (static_cast<std::uint64_t>(r2 + (1 << 19)) << 25) |
                            static_cast<std::uint64_t>(rd + (1 << 13));
  Shard& shard = shards_[(key * 0x9E3779B97F4A7C15ULL) >> 58];
  {
    std::lock_guard lock(shard.mutex);
    if (const auto it = shard.map.find(key); it != shard.map.end()) {
      ++shard.hits;
      return it->second;
    }
  }
  OvertakingState rep = state;
  rep.v_bv = bucket_centre(bv);
  rep.r2 = bucket_centre(r2);
  rep.r2_dot = bucket_centre(rd);
  rep.r1_dot = 0.0;
  const std::uint64_t value = challenge_mask(sm, rep, ndd, config);
  std::lock_guard lock(shard.mutex);
  ++shard.misses;
  if (shard.map.size() >= kMaxPerShard) shard.map.clear();
  shard.map.emplace(key, value);
  return value;
}

std::size_t ChallengeCache::size() const {
  std::size_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mutex);
    n += s.map.size();
  }
  return n;
}

std::uint64_t ChallengeCache::hits() const {
  std::uint64_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mutex);
    n += s.hits;
  }
  return n;
}

std::uint64_t ChallengeCache::misses() const {
  std::uint64_t n = 0;
  for (const auto& s : shards_) {
    std::lock_guard lock(s.mutex);
    n += s.misses;
  }
  return n;
}

namespace {

Criticality criticality_from(const OvertakingState& state, const std::vector<double>& p,
                             const std::vector<SurrogateSpec>& sms, const NddModel& ndd, const SimConfig& config,
                             ChallengeCache* cache) {
  Criticality c;
  c.challenges.assign(sms.size(), std::vector<double>(p.size(), 0.0));
  // Only actions with positive exposure can contribute.
  const bool any_cut = p.back() > 0.0;
  if (state.bv_lane == Lane::left && !any_cut) return c;
  std::vector<double> worst(p.size(), 0.0);
  for (std::size_t j = 0; j < sms.size(); ++j) {
    const std::uint64_t mask = cache ? cache->mask(j, sms[j], state, ndd, config)
                                     : challenge_mask(sms[j], state, ndd, config);
    if (mask == 0) continue;
    for (std::size_t a = 0; a < p.size(); ++a) {
      if ((mask >> a) & 1U) {
        c.challenges[j][a] = 1.0;
        worst[a] = 1.0;
      }
    }
  }
  for (std::size_t a = 0; a < p.size(); ++a) c.value += p[a] * worst[a];
  return c;
}

ImportanceDistribution importance_from(const OvertakingState& state, std::vector<double> p, const NddModel& ndd,
                                       const NadeOptions& o, const SimConfig& config, ChallengeCache* cache) {
  ImportanceDistribution d;
  d.naturalistic = std::move(p);
  const std::size_t n = d.naturalistic.size();
  if (std::isinf(o.criticality_threshold) && o.criticality_threshold > 0.0) {
    d.mixture = d.naturalistic;
    d.per_sm.assign(o.surrogates.size(), d.naturalistic);
    return d;
  }
  const Criticality c = criticality_from(state, d.naturalistic, o.surrogates, ndd, config, cache);
  d.criticality = c.value;
  d.is_critical = c.value > o.criticality_threshold;
  if (!d.is_critical) {
    d.mixture = d.naturalistic;
    d.per_sm.assign(o.surrogates.size(), d.naturalistic);
    return d;
  }
  const auto& pa = d.naturalistic;
  d.per_sm.assign(o.surrogates.size(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < o.surrogates.size(); ++j) {
    double z = 0.0;
    for (std::size_t a = 0; a < n; ++a) z += pa[a] * c.challenges[j][a];
    auto& q = d.per_sm[j];
    if (z > 0.0) {
      for (std::size_t a = 0; a < n; ++a) {
        q[a] = (1.0 - o.epsilon) * pa[a] * c.challenges[j][a] / z + o.epsilon * pa[a];
      }
    } else {
      q = pa;
    }
  }
  d.mixture.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double m = 0.0;
    for (std::size_t j = 0; j < o.surrogates.size(); ++j) m += o.alpha[j] * d.per_sm[j][a];
    d.mixture[a] = m;
  }
  return d;
}

}  // namespace

Criticality criticality(const OvertakingState& state, const std::vector<SurrogateSpec>& sms, const NddModel& ndd,
                        const SimConfig& config, ChallengeCache* cache) {
  return criticality_from(state, nde_action_distribution(ndd, state), sms, ndd, config, cache);
}

ImportanceDistribution importance_distribution(const OvertakingState& state, const NddModel& ndd,
                                               const NadeOptions& options, const SimConfig& config,
                                               ChallengeCache* cache) {
  return importance_from(state, nde_action_distribution(ndd, state), ndd, options, config, cache);
}

EpisodeResult run_nade_episode(Rng& rng, const NddModel& ndd, const NadeOptions& options, const DriverParams& av,
                               const SimConfig& config, ChallengeCache* cache, bool trace) {
  EpisodeResult result;
  if (trace) result.trajectory.emplace();
  TestRecord& record = result.test_record;
  OvertakingState s = sample_initial_state(ndd, rng);
  while (s.t < config.horizon_steps) {
    const auto d = importance_from(s, nde_action_distribution(ndd, s), ndd, options, config, cache);
    const std::size_t a = rng.discrete(d.is_critical ? d.mixture : d.naturalistic);
    if (d.is_critical) {
      CriticalStepRecord step;
      step.p = d.naturalistic[a];
      step.q_alpha = d.mixture[a];
      step.q.reserve(d.per_sm.size());
      for (const auto& q : d.per_sm) step.q.push_back(q[a]);
      if (!(step.q_alpha > 0.0)) throw std::logic_error("sampled an action with zero mixture probability");
      record.steps.push_back(std::move(step));
    }
    const double av_accel = av_acceleration(av, s, config.vehicle_length);
    if (trace) result.trajectory->push_back(TraceRow{s, a, av_accel});
    s = step_dynamics(s, lv_acceleration(config, s), BvAction::from_index(ndd, a), av_accel, config.dt);
    if (is_crash(s, config.vehicle_length)) {
      result.crash = true;
      break;
    }
  }
  result.duration_steps = s.t;
  record.crash_prob = result.crash ? 1.0 : 0.0;
  record.num_control_steps = record.steps.size();
  record.weight = record.likelihood_ratio();
  return result;
}

std::string ColumnCount::to_string() const {
  char buf[96];
  const double exponent10 = std::floor(log10_value);
  std::snprintf(buf, sizeof buf, "%zu^%zu = %.3fe%+.0f", components, exponent, std::pow(10.0, log10_value - exponent10),
                exponent10);
  return buf;
}

ColumnCount column_count(std::size_t components, std::size_t horizon_steps) {
  ColumnCount c;
  c.components = components;
  c.exponent = horizon_steps + 2;
  c.log10_value = static_cast<double>(c.exponent) * std::log10(static_cast<double>(components));
  return c;
}

}  // namespace scvsafe
