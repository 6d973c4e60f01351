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
#include <filesystem>
#include <string>
#include <vector>

#include "scvsafe/rng.hpp"

namespace scvsafe {

/// Bin edges plus per-bin probabilities; a draw picks a bin and then a uniform
/// point inside it (two uniforms).
struct BinnedDistribution {
  std::vector<double> edges;
  std::vector<double> probs;

  double sample(Rng& rng) const;
  friend bool operator==(const BinnedDistribution&, const BinnedDistribution&) = default;
};

/// Index of the bin holding x; values outside the edges map to the end bins.
std::size_t bin_index(const std::vector<double>& edges, double x);

/// Naturalistic behaviour of the background vehicle. Acceleration rows are
/// distributions over accel_grid.
struct NddModel {
  std::vector<double> accel_grid;

  BinnedDistribution initial_v_bv;
  BinnedDistribution initial_r1;
  BinnedDistribution initial_r1_dot;
  double r2_min = 20.0;
  double r2_max = 100.0;
  double r2_dot_min = -10.0;
  double r2_dot_max = -5.0;

  /// Car following behind the leading vehicle, conditioned on (r1, r1_dot);
  /// cell (i, k) is stored at i * (r1_dot bins) + k.
  std::vector<double> cf_r1_edges;
  std::vector<double> cf_r1_dot_edges;
  std::vector<std::vector<double>> cf_probs;

  /// Free driving after the cut-in, conditioned on the BV speed.
  std::vector<double> free_v_edges;
  std::vector<std::vector<double>> free_probs;

  /// Cut-in propensity conditioned on (r2, r2_dot), same cell layout.
  std::vector<double> cut_r2_edges;
  std::vector<double> cut_r2_dot_edges;
  std::vector<double> cut_probs;

  [[nodiscard]] const std::vector<double>& car_following_row(double r1, double r1_dot) const;
  [[nodiscard]] const std::vector<double>& free_driving_row(double v) const;
  [[nodiscard]] double cut_in_probability(double r2, double r2_dot) const;

  friend bool operator==(const NddModel&, const NddModel&) = default;
};

/// Table violations (normalisation to 1e-9, negativity, shape), empty when valid.
std::vector<std::string> validate(const NddModel& model);

struct SyntheticNddOptions {
  std::size_t grid_points = 31;
  double accel_lo = -4.0;
  double accel_hi = 2.0;
  double accel_sd = 0.6;
  /// Mass added to every acceleration before normalising.
  double accel_floor = 2e-4;
  double cut_in_base = 1e-5;
  double cut_in_urgency_gain = 40.0;
  double cut_in_cap = 0.5;
  /// Gap acceptance: no cut-in while r2 is below this range.
  double cut_in_min_gap = 8.0;
};

/// Truncated, discretised Gaussians for the initial car-following state and
/// Gaussian-shaped acceleration rows around a simple human response.
NddModel synthetic_ndd(const SyntheticNddOptions& options = {});

std::string to_json(const NddModel& model);
NddModel ndd_from_json(const std::string& text);
NddModel load_ndd(const std::filesystem::path& path);
void save_ndd(const NddModel& model, const std::filesystem::path& path);

}  // namespace scvsafe
