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

#include "scvsafe/driver_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace scvsafe {
namespace {

double clamp_accel(double a) { return std::clamp(a, kAccelMin, kAccelMax); }

void require_gap(double gap) {
  if (!(gap > 0.0)) throw std::invalid_argument("overlap before model evaluation");
}

}  // namespace

double FvdmParams::optimal_velocity(double gap) const {
  if (std::isinf(gap)) return 0.5 * v_max * (1.0 + std::tanh(s_c / width));
  return 0.5 * v_max * (std::tanh((gap - s_c) / width) + std::tanh(s_c / width));
}

DriverParams DriverParams::idm(double max_accel, std::string name) {
  IdmParams p;
  p.max_accel = max_accel;
  return DriverParams{std::move(name), p};
}

DriverParams DriverParams::fvdm(double a_min, std::string name) {
  FvdmParams p;
  p.a_min = a_min;
  return DriverParams{std::move(name), p};
}

DriverParams sm_one() { return DriverParams::idm(2.0, "SM-I"); }
DriverParams sm_two() { return DriverParams::fvdm(-1.0, "SM-II"); }
DriverParams sm_three() { return DriverParams::fvdm(-6.0, "SM-III"); }

std::vector<std::string> validate(const DriverParams& params) {
  std::vector<std::string> issues;
  const std::string who = params.name + ": ";
  if (const auto* idm = std::get_if<IdmParams>(&params.model)) {
    if (!(idm->max_accel > 0.0)) issues.push_back(who + "IDM max acceleration must be > 0");
    if (!(idm->desired_speed > 0.0)) issues.push_back(who + "IDM desired speed must be > 0");
    if (!(idm->time_headway >= 0.0)) issues.push_back(who + "IDM time headway must be >= 0");
    if (!(idm->jam_distance >= 0.0)) issues.push_back(who + "IDM jam distance must be >= 0");
    if (!(idm->comfortable_decel > 0.0)) issues.push_back(who + "IDM comfortable deceleration must be > 0");
    if (!(idm->exponent > 0.0)) issues.push_back(who + "IDM exponent must be > 0");
  } else {
    const auto& f = std::get<FvdmParams>(params.model);
    if (!(f.a_min < 0.0)) issues.push_back(who + "FVDM a_min must be < 0");
    if (!(f.kappa >= 0.0)) issues.push_back(who + "FVDM kappa must be >= 0");
    if (!(f.lambda >= 0.0)) issues.push_back(who + "FVDM lambda must be >= 0");
    if (!(f.v_max > 0.0)) issues.push_back(who + "FVDM v_max must be > 0");
    if (!(f.width > 0.0)) issues.push_back(who + "FVDM width must be > 0");
  }
  return issues;
}

double idm_acceleration(const IdmParams& p, double v, double gap, double approach_rate) {
  require_gap(gap);
  const double free_term = std::pow(v / p.desired_speed, p.exponent);
  double interaction = 0.0;
  if (!std::isinf(gap)) {
    const double s_star =
        p.jam_distance + v * p.time_headway + v * approach_rate / (2.0 * std::sqrt(p.max_accel * p.comfortable_decel));
    interaction = (s_star / gap) * (s_star / gap);
  }
  return clamp_accel(p.max_accel * (1.0 - free_term - interaction));
}

double fvdm_acceleration(const FvdmParams& p, double v, double gap, double approach_rate) {
  require_gap(gap);
  const double a = p.kappa * (p.optimal_velocity(gap) - v) - p.lambda * approach_rate;
  return clamp_accel(std::max(a, p.a_min));
}

double free_acceleration(const DriverParams& params, double v) {
  return car_following_acceleration(params, v, std::numeric_limits<double>::infinity(), 0.0);
}

double car_following_acceleration(const DriverParams& params, double v, double gap, double approach_rate) {
  if (const auto* idm = std::get_if<IdmParams>(&params.model)) {
    return idm_acceleration(*idm, v, gap, approach_rate);
  }
  return fvdm_acceleration(std::get<FvdmParams>(params.model), v, gap, approach_rate);
}

}  // namespace scvsafe
