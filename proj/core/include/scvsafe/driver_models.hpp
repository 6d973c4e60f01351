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

#include <string>
#include <variant>
#include <vector>

namespace scvsafe {

/// Physical plausibility bounds applied to every model output.
inline constexpr double kAccelMin = -8.0;
inline constexpr double kAccelMax = 4.0;

struct IdmParams {
  double max_accel = 2.0;   // alpha
  double desired_speed = 33.3;
  double time_headway = 1.5;
  double jam_distance = 2.0;
  double comfortable_decel = 3.0;
  double exponent = 4.0;
};

struct FvdmParams {
  double kappa = 0.41;
  double lambda = 0.5;
  double a_min = -1.0;
  double v_max = 33.3;
  double s_c = 15.0;
  double width = 8.0;

  /// v_max / 2 * (tanh((gap - s_c) / w) + tanh(s_c / w)).
  [[nodiscard]] double optimal_velocity(double gap) const;
};

struct DriverParams {
  std::string name = "IDM";
  std::variant<IdmParams, FvdmParams> model = IdmParams{};

  static DriverParams idm(double max_accel, std::string name = "IDM");
  static DriverParams fvdm(double a_min, std::string name = "FVDM");
};

/// SM-I (IDM, alpha = 2), SM-II (FVDM floor -1), SM-III (FVDM floor -6).
DriverParams sm_one();
DriverParams sm_two();
DriverParams sm_three();

/// Parameter violations, empty when valid.
std::vector<std::string> validate(const DriverParams& params);

/// Standard IDM response, clamped to [kAccelMin, kAccelMax]. Throws
/// std::invalid_argument("overlap before model evaluation") when gap <= 0.
double idm_acceleration(const IdmParams& params, double v, double gap, double approach_rate);

/// kappa (V_opt(gap) - v) - lambda * approach_rate, floored at a_min, then
/// clamped. Same gap precondition as the IDM.
double fvdm_acceleration(const FvdmParams& params, double v, double gap, double approach_rate);

/// Response with no leader (infinite gap).
double free_acceleration(const DriverParams& params, double v);

/// Dispatches on the model kind.
double car_following_acceleration(const DriverParams& params, double v, double gap, double approach_rate);

}  // namespace scvsafe
