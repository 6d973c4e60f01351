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

#include "scvsafe/traffic_sim.hpp"

#include <limits>
#include <stdexcept>

namespace scvsafe {

BvAction BvAction::from_index(const NddModel& ndd, std::size_t index) {
  if (index < ndd.accel_grid.size()) return accelerate(ndd.accel_grid[index]);
  if (index == ndd.accel_grid.size()) return cut_in();
  throw std::out_of_range("BV action index out of range");
}

bool is_crash(const OvertakingState& state, double vehicle_length) {
  return state.bv_lane == Lane::right && state.r2 <= vehicle_length;
}

bool cut_in_feasible(const OvertakingState& state) { return state.bv_lane == Lane::left && state.r2 > 0.0; }

OvertakingState sample_initial_state(const NddModel& ndd, Rng& rng) {
  OvertakingState s;
  s.v_bv = ndd.initial_v_bv.sample(rng);
  s.r1 = ndd.initial_r1.sample(rng);
  s.r1_dot = ndd.initial_r1_dot.sample(rng);
  s.r2 = rng.uniform(ndd.r2_min, ndd.r2_max);
  s.r2_dot = rng.uniform(ndd.r2_dot_min, ndd.r2_dot_max);
  // Keep the reconstructed LV speed physical.
  if (s.v_lv() < 0.0) s.r1_dot = -s.v_bv;
  return s;
}

Motion integrate(double v, double a, double dt) {
  const double v_end = v + a * dt;
  if (v_end >= 0.0) return {v * dt + 0.5 * a * dt * dt, v_end};
  // Stops inside the step: v + a t = 0.
  return {v > 0.0 ? -0.5 * v * v / a : 0.0, 0.0};
}

OvertakingState step_dynamics(const OvertakingState& s, double a_lv, const BvAction& bv_action, double av_accel,
                              double dt) {
  const double a_bv = bv_action.kind == BvAction::Kind::cut_in ? 0.0 : bv_action.accel;
  const Motion lv = integrate(std::max(0.0, s.v_lv()), a_lv, dt);
  const Motion bv = integrate(std::max(0.0, s.v_bv), a_bv, dt);
  const Motion av = integrate(std::max(0.0, s.v_av()), av_accel, dt);
  OvertakingState n;
  n.v_bv = bv.speed;
  n.r1 = s.r1 + lv.displacement - bv.displacement;
  n.r1_dot = lv.speed - bv.speed;
  n.r2 = s.r2 + bv.displacement - av.displacement;
  n.r2_dot = bv.speed - av.speed;
  n.bv_lane = bv_action.kind == BvAction::Kind::cut_in ? Lane::right : s.bv_lane;
  n.t = s.t + 1;
  return n;
}

double av_acceleration(const DriverParams& av, const OvertakingState& s, double vehicle_length) {
  const double v = std::max(0.0, s.v_av());
  if (s.bv_lane == Lane::left) return free_acceleration(av, v);
  return car_following_acceleration(av, v, s.r2 - vehicle_length, -s.r2_dot);
}

double lv_acceleration(const SimConfig& config, const OvertakingState& s) {
  if (!config.lv_model) return 0.0;
  return free_acceleration(*config.lv_model, std::max(0.0, s.v_lv()));
}

std::vector<double> nde_action_distribution(const NddModel& ndd, const OvertakingState& s) {
  const std::size_t g = ndd.accel_grid.size();
  std::vector<double> dist(g + 1, 0.0);
  const auto& row = s.bv_lane == Lane::left ? ndd.car_following_row(s.r1, s.r1_dot) : ndd.free_driving_row(s.v_bv);
  const double cut = cut_in_feasible(s) ? ndd.cut_in_probability(s.r2, s.r2_dot) : 0.0;
  for (std::size_t k = 0; k < g; ++k) dist[k] = (1.0 - cut) * row[k];
  dist[g] = cut;
  return dist;
}

EpisodeResult run_nde_episode(Rng& rng, const NddModel& ndd, const DriverParams& av, const SimConfig& config,
                              bool trace) {
  EpisodeResult result;
  if (trace) result.trajectory.emplace();
  OvertakingState s = sample_initial_state(ndd, rng);
  while (s.t < config.horizon_steps) {
    const auto dist = nde_action_distribution(ndd, s);
    const std::size_t a = rng.discrete(dist);
    const double av_accel = av_acceleration(av, s, config.vehicle_length);
    if (trace) result.trajectory->push_back(TraceRow{s, a, av_accel});
    s = step_dynamics(s, lv_acceleration(config, s), BvAction::from_index(ndd, a), av_accel, config.dt);
    if (is_crash(s, config.vehicle_length)) {
      result.crash = true;
      break;
    }
  }
  result.duration_steps = s.t;
  result.test_record.crash_prob = result.crash ? 1.0 : 0.0;
  return result;
}

void write_trace_csv(std::ostream& out, const NddModel& ndd, const std::vector<TraceRow>& rows) {
  out << "t,v_bv,r1,r1_dot,r2,r2_dot,bv_lane,bv_action,av_accel\n";
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rows) {
    const auto& s = r.state;
    out << s.t << ',' << s.v_bv << ',' << s.r1 << ',' << s.r1_dot << ',' << s.r2 << ',' << s.r2_dot << ','
        << (s.bv_lane == Lane::left ? "left" : "right") << ',';
    if (r.action < ndd.accel_grid.size()) {
      out << ndd.accel_grid[r.action];
    } else {
      out << "cut_in";
    }
    out << ',' << r.av_accel << '\n';
  }
}

}  // namespace scvsafe
