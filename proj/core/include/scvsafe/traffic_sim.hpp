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
#include <optional>
#include <ostream>
#include <vector>

#include "scvsafe/driver_models.hpp"
#include "scvsafe/ndd_model.hpp"
#include "scvsafe/records.hpp"
#include "scvsafe/rng.hpp"

namespace scvsafe {

enum class Lane { left, right };

/// Relative state of the three-vehicle overtaking scenario. LV leads BV in the
/// left lane; AV approaches BV from behind in the right lane.
struct OvertakingState {
  double v_bv = 0.0;
  double r1 = 0.0;      // x_LV - x_BV
  double r1_dot = 0.0;  // v_LV - v_BV
  double r2 = 0.0;      // x_BV - x_AV
  double r2_dot = 0.0;  // v_BV - v_AV
  Lane bv_lane = Lane::left;
  int t = 0;

  [[nodiscard]] double v_lv() const { return v_bv + r1_dot; }
  [[nodiscard]] double v_av() const { return v_bv - r2_dot; }

  friend bool operator==(const OvertakingState&, const OvertakingState&) = default;
};

/// BV actions are indexed as in the action distribution: 0..G-1 accelerate
/// with accel_grid[i], G is the cut-in.
struct BvAction {
  enum class Kind { accelerate, cut_in };
  Kind kind = Kind::accelerate;
  double accel = 0.0;

  static BvAction accelerate(double a) { return {Kind::accelerate, a}; }
  static BvAction cut_in() { return {Kind::cut_in, 0.0}; }
  static BvAction from_index(const NddModel& ndd, std::size_t index);
};

struct SimConfig {
  int horizon_steps = 201;
  double dt = 0.1;
  double vehicle_length = 5.0;
  /// Constant-speed LV when unset; otherwise the LV drives freely with this model.
  std::optional<DriverParams> lv_model;
};

bool is_crash(const OvertakingState& state, double vehicle_length = 5.0);
bool cut_in_feasible(const OvertakingState& state);

/// (v_bv, r1, r1_dot) from the initial tables, r2 ~ U(r2_min, r2_max),
/// r2_dot ~ U(r2_dot_min, r2_dot_max); eight uniforms in total.
OvertakingState sample_initial_state(const NddModel& ndd, Rng& rng);

struct Motion {
  double displacement = 0.0;
  double speed = 0.0;
};

/// Constant acceleration over dt, stopping at zero speed.
Motion integrate(double v, double a, double dt);

/// Advances one step; a cut-in flips the BV lane within the step and the BV
/// holds its speed while doing so.
OvertakingState step_dynamics(const OvertakingState& state, double a_lv, const BvAction& bv_action, double av_accel,
                              double dt);

/// Free driving while the BV is in the other lane, following it afterwards.
double av_acceleration(const DriverParams& av, const OvertakingState& state, double vehicle_length = 5.0);

double lv_acceleration(const SimConfig& config, const OvertakingState& state);

/// p(a|s) over the accel grid plus the cut-in (last entry); sums to 1.
std::vector<double> nde_action_distribution(const NddModel& ndd, const OvertakingState& state);

struct TraceRow {
  OvertakingState state;
  std::size_t action = 0;
  double av_accel = 0.0;
};

struct EpisodeResult {
  bool crash = false;
  int duration_steps = 0;
  TestRecord test_record;
  std::optional<std::vector<TraceRow>> trajectory;
};

EpisodeResult run_nde_episode(Rng& rng, const NddModel& ndd, const DriverParams& av, const SimConfig& config = {},
                              bool trace = false);

/// t, state fields, BV action and AV acceleration, one row per step.
void write_trace_csv(std::ostream& out, const NddModel& ndd, const std::vector<TraceRow>& rows);

}  // namespace scvsafe
