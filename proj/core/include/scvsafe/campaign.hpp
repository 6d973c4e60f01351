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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scvsafe/driver_models.hpp"
#include "scvsafe/estimators.hpp"
#include "scvsafe/nade.hpp"
#include "scvsafe/ndd_model.hpp"
#include "scvsafe/records.hpp"
#include "scvsafe/scv.hpp"
#include "scvsafe/traffic_sim.hpp"

namespace scvsafe {

enum class CampaignMode { nde, nade };

struct CampaignConfig {
  CampaignMode mode = CampaignMode::nade;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  NadeOptions nade;
  std::size_t max_control_steps = kDefaultMaxControlSteps;
  double rhw_threshold = 0.3;
  double confidence = kDefaultConfidence;
  DriverParams av = DriverParams::idm(2.0, "AV");
  SimConfig sim;
  /// Empty selects the built-in synthetic model.
  std::string ndd_path;
  SyntheticNddOptions synthetic;
  std::filesystem::path output_dir = "scvsafe_out";
  bool trace = false;
  /// Episodes with test_id below this get a trajectory CSV when tracing.
  std::size_t trace_limit = 20;
  /// 0 selects std::thread::hardware_concurrency().
  std::size_t workers = 1;
};

/// Every violation, not just the first.
std::vector<std::string> validate(const CampaignConfig& config);

/// Structured config text (JSON). Unknown keys are rejected; omitted keys keep
/// their defaults. Throws std::invalid_argument listing every problem.
CampaignConfig config_from_json(const std::string& text);
std::string config_to_json(const CampaignConfig& config);
CampaignConfig load_config(const std::filesystem::path& path);

/// Builds the NDD model the campaign uses (file or synthetic).
NddModel resolve_ndd(const CampaignConfig& config);

/// Runs n episodes on config.workers threads. Record i always comes from the
/// random stream (seed, i), so the output does not depend on the schedule.
std::vector<TestRecord> simulate(const CampaignConfig& config, const NddModel& ndd,
                                 std::vector<std::vector<TraceRow>>* traces = nullptr);

struct CampaignEstimates {
  std::size_t n = 0;
  std::size_t crashes = 0;
  std::size_t components = 0;
  std::optional<EstimateReport> crude;
  std::optional<EstimateReport> importance;
  std::optional<ScvResult> scv;
};

/// crude for NDE records; importance and SCV when critical steps exist.
CampaignEstimates estimate_all(std::span<const TestRecord> records, CampaignMode mode,
                               std::size_t max_control_steps, double confidence);

/// Summary JSON: resolved config echo, estimates, per-stratum table and the
/// column-count diagnostic.
std::string summary_json(const CampaignConfig& config, const CampaignEstimates& estimates);

struct CampaignResult {
  std::vector<TestRecord> records;
  CampaignEstimates estimates;
  std::filesystem::path records_path;
  std::filesystem::path summary_path;
  std::optional<std::filesystem::path> strata_path;
};

/// Simulates, writes records.jsonl, summary.json and (with SCV) strata.csv
/// under config.output_dir.
CampaignResult run_campaign(const CampaignConfig& config);

std::string to_string(CampaignMode mode);
CampaignMode parse_mode(const std::string& name);

}  // namespace scvsafe
