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

#include <array>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scvsafe/driver_models.hpp"
#include "scvsafe/ndd_model.hpp"
#include "scvsafe/traffic_sim.hpp"

namespace scvsafe {

struct SurrogateSpec {
  int id = 1;
  DriverParams driver;
  int challenge_horizon = 30;
};

/// SM-I, SM-II and SM-III with ids 1..3.
std::vector<SurrogateSpec> default_surrogates(int challenge_horizon = 30);

struct NadeOptions {
  std::vector<SurrogateSpec> surrogates = default_surrogates();
  std::vector<double> alpha = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double epsilon = 0.1;
  double criticality_threshold = 0.0;
};

std::vector<std::string> validate(const NadeOptions& options);

/// Deterministic rollout: the action for one step, then zero BV acceleration
/// for challenge_horizon steps with the surrogate driving the AV. 1 on a crash.
double maneuver_challenge(const SurrogateSpec& sm, const OvertakingState& state, const BvAction& action,
                          const SimConfig& config = {});

/// Memo of per-action challenge bitmasks keyed by surrogate and a 0.5-unit
/// bucket of (v_bv, r2, r2_dot, lane). The stored mask is the exact rollout at
/// the bucket centre, so lookups are a pure function of the key and the cache
/// can be shared by any number of workers.
class ChallengeCache {
 public:
  static constexpr double kResolution = 0.5;

  std::uint64_t mask(std::size_t sm_index, const SurrogateSpec& sm, const OvertakingState& state,
                     const NddModel& ndd, const SimConfig& config);

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::uint64_t hits() const;
  [[nodiscard]] std::uint64_t misses() const;

 private:
  static constexpr std::size_t kShards = 64;
  static constexpr std::size_t kMaxPerShard = 1u << 18;
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_map<std::uint64_t, std::uint64_t> map;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
  };
  std::array<Shard, kShards> shards_;
};

/// Bit k set when action k (in action-distribution order) leads to a crash
/// under the surrogate; computed exactly at the given state.
std::uint64_t challenge_mask(const SurrogateSpec& sm, const OvertakingState& state, const NddModel& ndd,
                             const SimConfig& config);

struct Criticality {
  double value = 0.0;
  /// challenges[j][a] in {0, 1}.
  std::vector<std::vector<double>> challenges;
};

/// sum_a p(a|s) max_j challenge_j(s, a). Uses the cache when given.
Criticality criticality(const OvertakingState& state, const std::vector<SurrogateSpec>& sms, const NddModel& ndd,
                        const SimConfig& config = {}, ChallengeCache* cache = nullptr);

struct ImportanceDistribution {
  std::vector<double> naturalistic;
  std::vector<double> mixture;
  std::vector<std::vector<double>> per_sm;
  bool is_critical = false;
  double criticality = 0.0;
};

ImportanceDistribution importance_distribution(const OvertakingState& state, const NddModel& ndd,
                                               const NadeOptions& options, const SimConfig& config = {},
                                               ChallengeCache* cache = nullptr);

/// Same dynamics and random stream as run_nde_episode; critical steps sample
/// from the mixture and append a CriticalStepRecord.
EpisodeResult run_nade_episode(Rng& rng, const NddModel& ndd, const NadeOptions& options, const DriverParams& av,
                               const SimConfig& config = {}, ChallengeCache* cache = nullptr, bool trace = false);

/// Number of individual control variates of ordinary CV over every step of
/// the horizon, J^(T+2), reported as an exponent and log10.
struct ColumnCount {
  std::size_t components = 0;
  std::size_t exponent = 0;
  double log10_value = 0.0;
  [[nodiscard]] std::string to_string() const;
};
ColumnCount column_count(std::size_t components, std::size_t horizon_steps);

}  // namespace scvsafe
