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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scvsafe/campaign.hpp"
#include "scvsafe/compare.hpp"
#include "scvsafe/convergence.hpp"
#include "scvsafe/record_io.hpp"
#include "scvsafe/scv.hpp"
#include "scvsafe/toy_verify.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2, kVerificationFailure = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::ordered_json report_json(const scvsafe::EstimateReport& r) {
  nlohmann::ordered_json j;
  j["mean"] = r.mean;
  j["variance"] = r.asymptotic_variance;
  j["n"] = r.n;
  j["half_width"] = r.half_width;
  j["rhw"] = r.rhw ? nlohmann::ordered_json(*r.rhw) : nlohmann::ordered_json(nullptr);
  j["confidence"] = r.confidence;
  return j;
}

scvsafe::EstimatorKind estimator_or_throw(const std::string& name) {
  try {
    return scvsafe::parse_estimator(name);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

struct SimulateArgs {
  std::string config;
  std::string mode;
  std::size_t n = 0;
  std::int64_t seed = -1;
  std::int64_t workers = -1;
  std::string output;
  std::string threshold;
  bool trace = false;
};

int run_simulate(const SimulateArgs& a) {
  scvsafe::CampaignConfig config;
  try {
    if (!a.config.empty()) config = scvsafe::config_from_json(read_text(a.config));
    if (!a.mode.empty()) config.mode = scvsafe::parse_mode(a.mode);
    if (a.n > 0) config.n = a.n;
    if (a.seed >= 0) config.seed = static_cast<std::uint64_t>(a.seed);
    if (a.workers >= 0) config.workers = static_cast<std::size_t>(a.workers);
    if (!a.output.empty()) config.output_dir = a.output;
    if (const char* env = std::getenv("SCVSAFE_OUTPUT_DIR"); env != nullptr && *env != '\0') config.output_dir = env;
    if (!a.threshold.empty()) {
      config.nade.criticality_threshold =
          a.threshold == "inf" ? std::numeric_limits<double>::infinity() : std::stod(a.threshold);
    }
    if (a.trace) config.trace = true;
    if (const auto issues = scvsafe::validate(config); !issues.empty()) {
      std::string msg = "invalid config:";
      for (const auto& e : issues) msg += "\n  - " + e;
      throw ConfigError(msg);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto result = scvsafe::run_campaign(config);
  std::cout << read_text(result.summary_path.string());
  return kOk;
}

int run_estimate(const std::string& records_path, const std::string& estimator, double confidence,
                 std::size_t max_steps, const std::string& strata_csv) {
  const auto kind = estimator_or_throw(estimator);
  const auto records = scvsafe::read_jsonl(std::filesystem::path(records_path));
  if (records.empty()) throw std::runtime_error(records_path + ": no records");
  nlohmann::ordered_json j;
  j["records"] = records_path;
  j["estimator"] = std::string(scvsafe::to_string(kind));
  if (kind == scvsafe::EstimatorKind::scv) {
    scvsafe::ScvOptions o;
    o.confidence = confidence;
    o.max_control_steps = max_steps;
    const auto r = scvsafe::scv_estimate(records, o);
    j["estimate"] = report_json(r.report);
    auto strata = nlohmann::ordered_json::array();
    for (const auto& s : r.strata) {
      strata.push_back({{"l", s.l}, {"n_l", s.n_l}, {"d_l", s.d_l}, {"rank", s.fit.rank}, {"mu_hat", s.mu_hat}});
    }
    j["strata"] = std::move(strata);
    if (!strata_csv.empty()) {
      std::ofstream out(strata_csv);
      if (!out) throw std::runtime_error("cannot write " + strata_csv);
      scvsafe::write_strata_csv(out, r.strata);
    }
  } else if (kind == scvsafe::EstimatorKind::crude) {
    j["estimate"] = report_json(scvsafe::crude_monte_carlo(records, confidence));
  } else {
    j["estimate"] = report_json(scvsafe::importance_weighted_estimate(records, confidence));
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

std::vector<scvsafe::RecordSet> load_sets(const std::vector<std::string>& specs) {
  std::vector<scvsafe::RecordSet> sets;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    scvsafe::RecordSet set;
    set.label = eq == std::string::npos ? std::filesystem::path(spec).stem().string() : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    set.records = scvsafe::read_jsonl(std::filesystem::path(path));
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scvsafe: rare-event safety evaluation with sparse control variates"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an NDE or NADE campaign and write records + summary");
  simulate->add_option("-c,--config", sim.config, "Campaign config (JSON)");
  simulate->add_option("--mode", sim.mode, "nde or nade")->check(CLI::IsMember({"nde", "nade"}));
  simulate->add_option("-n,--episodes", sim.n, "Number of episodes");
  simulate->add_option("--seed", sim.seed, "Campaign seed");
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = all cores)");
  simulate->add_option("-o,--output", sim.output, "Output directory");
  simulate->add_option("--criticality-threshold", sim.threshold, "Number or inf");
  simulate->add_flag("--trace", sim.trace, "Write trajectory CSVs for the first episodes");

  std::string records_path;
  std::string estimator = "scv";
  double confidence = scvsafe::kDefaultConfidence;
  std::size_t max_steps = scvsafe::kDefaultMaxControlSteps;
  std::string strata_csv;
  auto* estimate = app.add_subcommand("estimate", "Estimate the crash rate from a JSONL record file");
  estimate->add_option("-r,--records", records_path, "records.jsonl")->required();
  estimate->add_option("-e,--estimator", estimator, "crude, is or scv");
  estimate->add_option("--confidence", confidence);
  estimate->add_option("--max-control-steps", max_steps);
  estimate->add_option("--strata-csv", strata_csv, "Write the per-stratum table here");

  std::string out_path;
  auto* convergence = app.add_subcommand("convergence", "Convergence curve CSV (n, mean, variance, rhw)");
  convergence->add_option("-r,--records", records_path, "records.jsonl")->required();
  convergence->add_option("-e,--estimator", estimator, "crude, is or scv");
  convergence->add_option("--confidence", confidence);
  convergence->add_option("--max-control-steps", max_steps);
  convergence->add_option("-o,--output", out_path, "CSV path (stdout when omitted)");

  std::vector<std::string> set_specs;
  std::vector<std::string> estimator_names;
  std::size_t shuffles = scvsafe::kDefaultShuffles;
  double threshold = scvsafe::kDefaultRhwThreshold;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string json_out;
  auto* cmp = app.add_subcommand("compare", "Bootstrap RNoT and AAR across record sets and estimators");
  cmp->add_option("-r,--records", set_specs, "label=path.jsonl (repeatable)")->required();
  cmp->add_option("-e,--estimators", estimator_names, "Estimators to run on every set")->delimiter(',');
  cmp->add_option("--shuffles", shuffles);
  cmp->add_option("--threshold", threshold, "RHW threshold");
  cmp->add_option("--confidence", confidence);
  cmp->add_option("--seed", seed);
  cmp->add_option("--workers", workers);
  cmp->add_option("--json", json_out, "Write the full report as JSON");

  auto* boot = app.add_subcommand("bootstrap", "Bootstrap RNoT of one estimator on one record set");
  boot->add_option("-r,--records", records_path, "records.jsonl")->required();
  boot->add_option("-e,--estimator", estimator, "crude, is or scv");
  boot->add_option("--shuffles", shuffles);
  boot->add_option("--threshold", threshold, "RHW threshold");
  boot->add_option("--confidence", confidence);
  boot->add_option("--seed", seed);
  boot->add_option("--workers", workers);

  std::string fixture;
  auto* verify = app.add_subcommand("toy-verify", "Run the enumerated toy-world verification suite");
  verify->add_option("--fixture", fixture, "Extra toy world (JSON) to validate and verify");

  std::size_t components = 3;
  int horizon = 201;
  auto* columns = app.add_subcommand("column-count", "Ordinary-CV column count J^(T+2) for a horizon");
  columns->add_option("-J,--components", components);
  columns->add_option("-T,--horizon", horizon);

  std::string ndd_out;
  auto* ndd = app.add_subcommand("ndd", "Write the built-in synthetic NDD model (JSON)");
  ndd->add_option("-o,--output", ndd_out, "Path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*estimate) return run_estimate(records_path, estimator, confidence, max_steps, strata_csv);
    if (*convergence) {
      const auto kind = estimator_or_throw(estimator);
      const auto records = scvsafe::read_jsonl(std::filesystem::path(records_path));
      scvsafe::ScvOptions o;
      o.max_control_steps = max_steps;
      std::ostringstream csv;
      scvsafe::emit_convergence_csv(csv, records, kind, confidence, o);
      write_or_print(out_path, csv.str());
      return kOk;
    }
    if (*cmp) {
      scvsafe::CompareOptions o;
      o.shuffles = shuffles;
      o.rhw_threshold = threshold;
      o.confidence = confidence;
      o.seed = seed;
      o.workers = workers;
      for (const auto& name : estimator_names) o.estimators.push_back(estimator_or_throw(name));
      const auto sets = load_sets(set_specs);
      const auto report = scvsafe::compare(sets, o);
      std::cout << report.render_table();
      if (!json_out.empty()) write_or_print(json_out, report.to_json());
      return kOk;
    }
    if (*boot) {
      scvsafe::BootstrapOptions o;
      o.num_shuffles = shuffles;
      o.rhw_threshold = threshold;
      o.confidence = confidence;
      o.seed = seed;
      o.workers = workers;
      o.estimator = estimator_or_throw(estimator);
      const auto records = scvsafe::read_jsonl(std::filesystem::path(records_path));
      const auto report = scvsafe::bootstrap_rnot(records, o);
      nlohmann::ordered_json j;
      j["estimator"] = std::string(scvsafe::to_string(o.estimator));
      j["shuffles"] = report.shuffles.size();
      j["mean_rnot"] = report.mean_rnot ? nlohmann::ordered_json(*report.mean_rnot) : nlohmann::ordered_json(nullptr);
      j["unreached"] = report.unreached;
      j["mean_rnot_with_fallback"] = report.mean_rnot_with_fallback
                                         ? nlohmann::ordered_json(*report.mean_rnot_with_fallback)
                                         : nlohmann::ordered_json(nullptr);
      auto rnots = nlohmann::ordered_json::array();
      for (const auto& s : report.shuffles) {
        rnots.push_back(s.rnot ? nlohmann::ordered_json(*s.rnot) : nlohmann::ordered_json(nullptr));
      }
      j["rnot"] = std::move(rnots);
      std::cout << j.dump(2) << '\n';
      return kOk;
    }
    if (*verify) {
      scvsafe::toy::VerifyOptions o;
      if (!fixture.empty()) o.fixture = read_text(fixture);
      const auto report = scvsafe::toy::verify_all(o);
      std::cout << report.render();
      return report.passed() ? kOk : kVerificationFailure;
    }
    if (*columns) {
      const auto cc = scvsafe::column_count(components, static_cast<std::size_t>(horizon));
      std::cout << cc.to_string() << " (log10 " << cc.log10_value << ")\n";
      return kOk;
    }
    if (*ndd) {
      write_or_print(ndd_out, scvsafe::to_json(scvsafe::synthetic_ndd()));
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
